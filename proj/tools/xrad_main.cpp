#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "xrad/imageio.hpp"
#include "xrad/loss.hpp"
#include "xrad/maskgen.hpp"
#include "xrad/metrics.hpp"
#include "xrad/radiomics.hpp"
#include "xrad/triplet.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ManifestEntry {
    std::string image_id;
    std::string image_path;
    std::string mask_path;
    std::string heatmap_path;
    int class_id = 0;
    std::vector<double> labels;
};

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw xrad::InputError("cannot open manifest " + path);
    fs::path root = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || fs::path(p).is_absolute()) return p;
        return (root / p).string();
    };
    std::vector<ManifestEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw xrad::InputError(path + ":" + std::to_string(line_no) +
                                   ": malformed JSON line: " + e.what());
        }
        ManifestEntry e;
        e.image_path = resolve(j.value("image", ""));
        e.mask_path = resolve(j.value("mask", ""));
        e.heatmap_path = resolve(j.value("heatmap", ""));
        e.class_id = j.value("class_id", 0);
        e.image_id = j.value("image_id", fs::path(e.image_path).stem().string());
        if (j.contains("labels")) e.labels = j["labels"].get<std::vector<double>>();
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw xrad::InputError(path + ": empty manifest");
    return entries;
}

struct RunConfig {
    xrad::RadiomicsConfig radiomics;
    std::vector<double> thresholds = {60.0, 180.0};
    int connectivity = 8;
    long long min_area = 1;
    int p_norm = 2;
    uint64_t seed = 0;
    std::string format = "json";
    int jobs = 0;  // 0 = hardware default
    bool strict = false;
};

void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& app) {
    std::ifstream f(path);
    if (!f) throw xrad::InputError("cannot open config " + path);
    json j;
    f >> j;
    // flags given on the command line take precedence over the file
    auto unset = [&](const std::string& flag) {
        const CLI::Option* o = app.get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    if (j.contains("ng") && unset("--ng")) cfg.radiomics.ng = j["ng"].get<int>();
    if (j.contains("delta") && unset("--delta")) cfg.radiomics.delta = j["delta"].get<int>();
    if (j.contains("alpha") && unset("--alpha")) cfg.radiomics.alpha = j["alpha"].get<int>();
    if (j.contains("angles")) cfg.radiomics.angles_deg = j["angles"].get<std::vector<int>>();
    if (j.contains("aggregation"))
        cfg.radiomics.aggregation = j["aggregation"] == "per-angle"
                                        ? xrad::AngleAggregation::PerAngle
                                        : xrad::AngleAggregation::MeanOverAngles;
    if (j.contains("thresholds") && unset("--thresholds"))
        cfg.thresholds = j["thresholds"].get<std::vector<double>>();
    if (j.contains("connectivity") && unset("--connectivity"))
        cfg.connectivity = j["connectivity"].get<int>();
    if (j.contains("min_area") && unset("--min-area"))
        cfg.min_area = j["min_area"].get<long long>();
    if (j.contains("p_norm") && unset("--p-norm")) cfg.p_norm = j["p_norm"].get<int>();
    if (j.contains("seed") && unset("--seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("format") && unset("--format")) cfg.format = j["format"].get<std::string>();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw xrad::InputError("cannot write " + out_path);
    f << content;
}

json config_json(const RunConfig& cfg) {
    return json{{"ng", cfg.radiomics.ng},
                {"delta", cfg.radiomics.delta},
                {"alpha", cfg.radiomics.alpha},
                {"angles", cfg.radiomics.angles_deg},
                {"aggregation", cfg.radiomics.aggregation == xrad::AngleAggregation::PerAngle
                                    ? "per-angle"
                                    : "mean-over-angles"},
                {"thresholds", cfg.thresholds},
                {"connectivity", cfg.connectivity},
                {"min_area", cfg.min_area},
                {"p_norm", cfg.p_norm},
                {"seed", cfg.seed}};
}

int effective_jobs(const RunConfig& cfg) {
    if (cfg.jobs > 0) return cfg.jobs;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// ---------------------------------------------------------------- extract

struct ExtractRecord {
    std::string image_id;
    std::optional<double> threshold;
    std::optional<xrad::BoundingBox> box;
    xrad::FeatureVector features;
    std::string error;
};

int cmd_extract(const std::string& manifest_path, const RunConfig& cfg,
                const std::string& out_path) {
    auto entries = load_manifest(manifest_path);
    std::vector<std::vector<ExtractRecord>> per_entry(entries.size());

#ifdef _OPENMP
#pragma omp parallel for num_threads(effective_jobs(cfg)) schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(entries.size()); ++i) {
        const ManifestEntry& e = entries[i];
        try {
            xrad::GrayImage img = xrad::io::load_gray(e.image_path);
            if (!e.mask_path.empty()) {
                xrad::RoiMask mask = xrad::io::load_mask(e.mask_path);
                ExtractRecord rec;
                rec.image_id = e.image_id;
                rec.features = xrad::extract_all(img, mask, cfg.radiomics);
                per_entry[i].push_back(std::move(rec));
            } else if (!e.heatmap_path.empty()) {
                xrad::Heatmap h = xrad::io::load_heatmap(e.heatmap_path);
                auto boxes = xrad::generate_bboxes(h, cfg.thresholds, cfg.connectivity,
                                                   cfg.min_area);
                for (const auto& tb : boxes) {
                    xrad::RoiMask mask(img.width, img.height);
                    for (int y = tb.box.y; y < tb.box.y + tb.box.h; ++y)
                        for (int x = tb.box.x; x < tb.box.x + tb.box.w; ++x) mask.set(x, y);
                    ExtractRecord rec;
                    rec.image_id = e.image_id;
                    rec.threshold = tb.threshold;
                    rec.box = tb.box;
                    rec.features = xrad::extract_all(img, mask, cfg.radiomics);
                    per_entry[i].push_back(std::move(rec));
                }
            } else {
                throw xrad::InputError("entry needs a mask or a heatmap");
            }
        } catch (const std::exception& ex) {
            ExtractRecord rec;
            rec.image_id = e.image_id;
            rec.error = ex.what();
            per_entry[i] = {std::move(rec)};
        }
    }

    int failures = 0;
    for (const auto& recs : per_entry)
        for (const auto& r : recs)
            if (!r.error.empty()) ++failures;

    if (cfg.format == "csv") {
        std::ostringstream os;
        // stable column set: feature names from the first successful record
        const xrad::FeatureVector* schema = nullptr;
        for (const auto& recs : per_entry)
            for (const auto& r : recs)
                if (r.error.empty()) {
                    schema = &r.features;
                    break;
                }
        os << "image_id,threshold,x,y,w,h";
        if (schema)
            for (const auto& [name, value] : *schema) os << "," << name;
        os << "\n";
        for (const auto& recs : per_entry)
            for (const auto& r : recs) {
                if (!r.error.empty()) continue;
                os << r.image_id << ",";
                if (r.threshold) os << fmt17(*r.threshold);
                os << ",";
                if (r.box)
                    os << r.box->x << "," << r.box->y << "," << r.box->w << "," << r.box->h;
                else
                    os << ",,,";
                for (const auto& [name, value] : r.features) os << "," << fmt17(value);
                os << "\n";
            }
        write_output(out_path, os.str());
    } else {
        json out;
        out["config"] = config_json(cfg);
        json records = json::array();
        for (const auto& recs : per_entry)
            for (const auto& r : recs) {
                json jr{{"image_id", r.image_id}};
                if (!r.error.empty()) {
                    jr["error"] = r.error;
                } else {
                    if (r.threshold) jr["threshold"] = *r.threshold;
                    if (r.box)
                        jr["box"] = {{"x", r.box->x}, {"y", r.box->y}, {"w", r.box->w},
                                     {"h", r.box->h}};
                    jr["features"] = r.features;
                }
                records.push_back(jr);
            }
        out["records"] = records;
        out["failures"] = failures;
        write_output(out_path, out.dump(2) + "\n");
    }

    if (failures > 0) {
        std::cerr << "extract: " << failures << " entr" << (failures == 1 ? "y" : "ies")
                  << " failed\n";
        if (cfg.strict) return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- maskgen

int cmd_maskgen(const std::string& manifest_path, const RunConfig& cfg,
                const std::string& out_path, const std::string& overlay_dir) {
    auto entries = load_manifest(manifest_path);
    std::vector<json> per_entry(entries.size());
    std::vector<std::string> errors(entries.size());

#ifdef _OPENMP
#pragma omp parallel for num_threads(effective_jobs(cfg)) schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(entries.size()); ++i) {
        const ManifestEntry& e = entries[i];
        try {
            if (e.heatmap_path.empty()) throw xrad::InputError("entry has no heatmap");
            xrad::Heatmap h = xrad::io::load_heatmap(e.heatmap_path);
            auto boxes =
                xrad::generate_bboxes(h, cfg.thresholds, cfg.connectivity, cfg.min_area);
            json arr = json::array();
            for (const auto& tb : boxes)
                arr.push_back(json{{"class_id", h.class_id},
                                   {"threshold", tb.threshold},
                                   {"x", tb.box.x},
                                   {"y", tb.box.y},
                                   {"w", tb.box.w},
                                   {"h", tb.box.h}});
            per_entry[i] = json{{"image_id", e.image_id}, {"boxes", arr}};
            if (!overlay_dir.empty()) {
                if (e.image_path.empty()) throw xrad::InputError("overlay needs an image");
                xrad::GrayImage img = xrad::io::load_gray(e.image_path);
                std::vector<xrad::BoundingBox> plain;
                for (const auto& tb : boxes) plain.push_back(tb.box);
                xrad::RgbImage ov = xrad::render_overlay(img, h, plain);
                xrad::io::save_rgb_png(ov, (fs::path(overlay_dir) / (e.image_id + ".png"))
                                               .string());
            }
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
            per_entry[i] = json{{"image_id", e.image_id}, {"error", ex.what()}};
        }
    }

    json out = json::array();
    for (auto& j : per_entry) out.push_back(std::move(j));
    write_output(out_path, out.dump(2) + "\n");

    int failures = static_cast<int>(std::count_if(
        errors.begin(), errors.end(), [](const std::string& s) { return !s.empty(); }));
    if (failures > 0) {
        std::cerr << "maskgen: " << failures << " entries failed\n";
        if (cfg.strict) return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- eval

std::vector<xrad::LocalizationCase> load_cases(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw xrad::InputError("cannot open cases file " + path);
    std::vector<xrad::LocalizationCase> cases;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw xrad::InputError(path + ":" + std::to_string(line_no) +
                                   ": malformed JSON line: " + e.what());
        }
        auto box = [](const json& b) {
            return xrad::BoundingBox{b.at("x").get<int>(), b.at("y").get<int>(),
                                     b.at("w").get<int>(), b.at("h").get<int>()};
        };
        xrad::LocalizationCase c;
        c.image_id = j.value("image_id", "");
        c.class_id = j.value("class_id", 0);
        c.ground_truth = box(j.at("gt"));
        for (const auto& p : j.at("preds")) c.predictions.push_back(box(p));
        cases.push_back(std::move(c));
    }
    if (cases.empty()) throw xrad::InputError(path + ": empty cases file");
    return cases;
}

int cmd_eval(const std::string& cases_path, const std::vector<double>& thresholds,
             const RunConfig& cfg, const std::string& out_path) {
    auto cases = load_cases(cases_path);
    xrad::SweepReport rep = xrad::sweep_report(cases, thresholds);
    write_output(out_path, cfg.format == "csv" ? rep.to_csv() : rep.to_json() + "\n");
    return 0;
}

// ---------------------------------------------------------------- auc

int cmd_auc(const std::string& scores_path, const RunConfig& cfg,
            const std::string& out_path) {
    std::ifstream f(scores_path);
    if (!f) throw xrad::InputError("cannot open scores file " + scores_path);
    std::map<int, std::vector<xrad::ScoredSample>> by_class;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw xrad::InputError(scores_path + ":" + std::to_string(line_no) +
                                   ": malformed JSON line: " + e.what());
        }
        xrad::ScoredSample s;
        s.score = j.at("score").get<double>();
        s.label = j.at("label").get<int>();
        s.class_id = j.value("class_id", 0);
        s.image_id = j.value("image_id", "");
        by_class[s.class_id].push_back(std::move(s));
    }
    if (by_class.empty()) throw xrad::InputError(scores_path + ": empty scores file");

    std::map<int, double> aucs;
    for (const auto& [cls, samples] : by_class) {
        try {
            aucs[cls] = xrad::roc_auc(samples);
        } catch (const xrad::MetricError&) {
            std::cerr << "auc: class " << cls << " has a single label value, skipped\n";
        }
    }
    if (aucs.empty()) throw xrad::MetricError("auc: no class with both labels present");
    double mean = 0.0;
    for (const auto& [cls, a] : aucs) mean += a;
    mean /= static_cast<double>(aucs.size());

    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "class_id,auc\n";
        for (const auto& [cls, a] : aucs) os << cls << "," << fmt17(a) << "\n";
        os << "mean," << fmt17(mean) << "\n";
        write_output(out_path, os.str());
    } else {
        json out;
        for (const auto& [cls, a] : aucs) out["per_class"]["class_" + std::to_string(cls)] = a;
        out["mean"] = mean;
        write_output(out_path, out.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- loss

std::vector<double> load_vector(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw xrad::InputError("cannot open " + path);
    json j;
    f >> j;
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object() && j.contains("features")) {
        // feature map: values taken in sorted name order
        std::vector<double> v;
        for (const auto& [name, value] : j["features"].items()) v.push_back(value.get<double>());
        return v;
    }
    throw xrad::InputError(path + ": expected a JSON array or {\"features\": {...}}");
}

int cmd_loss(const std::string& ifeat_path, const std::string& rfeat_path,
             const std::string& probs_path, const std::string& labels_path,
             const std::string& proj_path, int d_out, double lambda, const RunConfig& cfg,
             const std::string& out_path) {
    std::vector<double> i_f = load_vector(ifeat_path);
    std::vector<double> r_f = load_vector(rfeat_path);
    std::vector<double> probs = load_vector(probs_path);
    std::vector<double> labels = load_vector(labels_path);
    if (probs.size() != labels.size())
        throw xrad::InputError("probs (" + std::to_string(probs.size()) + ") and labels (" +
                               std::to_string(labels.size()) + ") lengths differ");

    xrad::Projection pi, pr;
    if (!proj_path.empty()) {
        std::ifstream f(proj_path);
        if (!f) throw xrad::InputError("cannot open projections file " + proj_path);
        json j;
        f >> j;
        auto parse = [](const json& p) {
            xrad::Projection out;
            out.d_in = p.at("d_in").get<int>();
            out.d_out = p.at("d_out").get<int>();
            for (const auto& row : p.at("weights"))
                for (const auto& v : row) out.weights.push_back(v.get<double>());
            out.bias = p.at("bias").get<std::vector<double>>();
            return out;
        };
        pi = parse(j.at("image"));
        pr = parse(j.at("radiomic"));
    } else {
        pi = xrad::Projection::random(static_cast<int>(i_f.size()), d_out, cfg.seed);
        pr = xrad::Projection::random(static_cast<int>(r_f.size()), d_out, cfg.seed + 1);
    }
    if (pi.d_in != static_cast<int>(i_f.size()))
        throw xrad::InputError("image features length " + std::to_string(i_f.size()) +
                               " does not match image projection d_in " +
                               std::to_string(pi.d_in));
    if (pr.d_in != static_cast<int>(r_f.size()))
        throw xrad::InputError("radiomic features length " + std::to_string(r_f.size()) +
                               " does not match radiomic projection d_in " +
                               std::to_string(pr.d_in));

    xrad::LossReport rep =
        xrad::total_loss(probs, labels, i_f, r_f, pi, pr, cfg.p_norm, lambda);
    json out{{"L_I", rep.classification}, {"distance", rep.distance}, {"L_II", rep.total}};
    write_output(out_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(const std::vector<int>& dims, int k, const RunConfig& cfg,
                  const std::string& out_path) {
    if (dims.size() != 4) throw xrad::ConfigError("--dims needs 4 values (B,C,H,W)");
    for (int d : dims)
        if (d < 1 || d > 8) throw xrad::ConfigError("gradcheck dims must be in [1, 8]");
    xrad::GradcheckReport rep =
        xrad::gradcheck({dims[0], dims[1], dims[2], dims[3]}, k, cfg.seed);
    write_output(out_path, rep.to_json() + "\n");
    return rep.max_err() < 1e-5 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radiomics-regularized weak-localization toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, out_path, manifest_path, overlay_dir;

    app.add_option("--config", config_path, "JSON config file (flags take precedence)");
    app.add_option("--jobs", cfg.jobs, "worker count (default: logical CPUs)");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--output,-o", out_path, "output file (default stdout)");
    app.add_option("--format", cfg.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--strict", cfg.strict, "nonzero exit on any per-entry failure");
    app.add_option("--ng", cfg.radiomics.ng, "gray levels");
    app.add_option("--delta", cfg.radiomics.delta, "neighborhood distance");
    app.add_option("--alpha", cfg.radiomics.alpha, "GLDM dependence tolerance");
    app.add_option("--thresholds", cfg.thresholds, "heatmap thresholds in (0,255)");
    app.add_option("--connectivity", cfg.connectivity, "4 or 8")
        ->check(CLI::IsMember({4, 8}));
    app.add_option("--min-area", cfg.min_area, "minimum component area in pixels");
    app.add_option("--p-norm", cfg.p_norm, "distance norm degree (1 or 2)")
        ->check(CLI::IsMember({1, 2}));

    auto* sc_extract = app.add_subcommand("extract", "radiomic features per manifest entry");
    sc_extract->add_option("manifest", manifest_path, "JSONL manifest")->required();

    auto* sc_maskgen = app.add_subcommand("maskgen", "heatmap-to-bounding-box generation");
    sc_maskgen->add_option("manifest", manifest_path, "JSONL manifest")->required();
    sc_maskgen->add_option("--overlay", overlay_dir, "directory for overlay PNGs");

    std::string cases_path;
    std::vector<double> iou_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    auto* sc_eval = app.add_subcommand("eval", "localization accuracy sweep");
    sc_eval->add_option("cases", cases_path, "JSONL localization cases")->required();
    sc_eval->add_option("--iou-thresholds", iou_thresholds, "ascending IoU thresholds");

    std::string scores_path;
    auto* sc_auc = app.add_subcommand("auc", "per-class ROC AUC");
    sc_auc->add_option("scores", scores_path, "JSONL scored samples")->required();

    std::string ifeat_path, rfeat_path, probs_path, labels_path, proj_path;
    int d_out = 8;
    double lambda = 1.0;
    auto* sc_loss = app.add_subcommand("loss", "composite classification + radiomic loss");
    sc_loss->add_option("--image-features", ifeat_path)->required();
    sc_loss->add_option("--radiomic-features", rfeat_path)->required();
    sc_loss->add_option("--probs", probs_path)->required();
    sc_loss->add_option("--labels", labels_path)->required();
    sc_loss->add_option("--projections", proj_path,
                        "JSON {image: {...}, radiomic: {...}}; seeded random if absent");
    sc_loss->add_option("--d-out", d_out, "projection output dim for seeded init");
    sc_loss->add_option("--lambda", lambda, "regularizer weight");

    std::vector<int> gc_dims = {1, 2, 4, 4};
    int gc_k = 3;
    auto* sc_gradcheck = app.add_subcommand("gradcheck", "attention gradient verification");
    sc_gradcheck->add_option("--dims", gc_dims, "B C H W, each <= 8");
    sc_gradcheck->add_option("--k", gc_k, "odd kernel size");

    // let global flags appear after the subcommand name
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg, app);
        cfg.radiomics.validate();

        if (sc_extract->parsed()) return cmd_extract(manifest_path, cfg, out_path);
        if (sc_maskgen->parsed()) return cmd_maskgen(manifest_path, cfg, out_path, overlay_dir);
        if (sc_eval->parsed()) return cmd_eval(cases_path, iou_thresholds, cfg, out_path);
        if (sc_auc->parsed()) return cmd_auc(scores_path, cfg, out_path);
        if (sc_loss->parsed())
            return cmd_loss(ifeat_path, rfeat_path, probs_path, labels_path, proj_path, d_out,
                            lambda, cfg, out_path);
        if (sc_gradcheck->parsed()) return cmd_gradcheck(gc_dims, gc_k, cfg, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
