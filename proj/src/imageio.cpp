#include "xrad/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "json.hpp"

namespace xrad::io {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

bool has_png_signature(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    unsigned char sig[8] = {};
    f.read(reinterpret_cast<char*>(sig), 8);
    return f.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

GrayImage read_png_gray(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1.0, -1.0);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_swap(png);  // little-endian rows
    png_read_update_info(png, info);
    bit_depth = png_get_bit_depth(png, info);

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<uint8_t> row(rowbytes);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            double v;
            if (bit_depth == 16) {
                uint16_t u;
                std::memcpy(&u, row.data() + 2 * x, 2);
                v = u;
            } else {
                v = row[x];
            }
            img.at(static_cast<int>(x), static_cast<int>(y)) = v;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw IoError(path + ": not a P5 PGM");
    auto next_int = [&]() {
        int c;
        // skip whitespace and '#' comments
        while ((c = f.peek()) != EOF && (std::isspace(c) || c == '#')) {
            if (c == '#') {
                std::string line;
                std::getline(f, line);
            } else {
                f.get();
            }
        }
        long v;
        f >> v;
        return v;
    };
    long w = next_int(), h = next_int(), maxval = next_int();
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw IoError(path + ": bad PGM header");
    f.get();  // single whitespace after maxval
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (maxval < 256) {
        std::vector<uint8_t> buf(static_cast<size_t>(w) * h);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() != static_cast<std::streamsize>(buf.size()))
            throw IoError(path + ": truncated PGM payload");
        for (size_t i = 0; i < buf.size(); ++i) img.pixels[i] = buf[i];
    } else {
        std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() != static_cast<std::streamsize>(buf.size()))
            throw IoError(path + ": truncated PGM payload");
        for (size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = (buf[2 * i] << 8) | buf[2 * i + 1];  // PGM is big-endian
    }
    return img;
}

void write_png(const std::string& path, int w, int h, int color_type, int bit_depth,
               const uint8_t* rows, size_t rowbytes) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < h; ++y)
        png_write_row(png, const_cast<png_bytep>(rows + static_cast<size_t>(y) * rowbytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

GrayImage load_gray(const std::string& path) {
    if (has_png_signature(path)) return read_png_gray(path);
    return read_pgm(path);
}

RoiMask load_mask(const std::string& path) {
    GrayImage img = load_gray(path);
    RoiMask m(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) m.bits[i] = img.pixels[i] > 0 ? 1 : 0;
    return m;
}

Heatmap load_heatmap(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open " + path);
        nlohmann::json j;
        f >> j;
        Heatmap h(j.at("width").get<int>(), j.at("height").get<int>(), 0.0,
                  j.value("class_id", 0));
        std::string raw = path.substr(0, path.size() - 5) + ".f32";
        std::ifstream rf(raw, std::ios::binary);
        if (!rf) throw IoError("cannot open " + raw);
        std::vector<float> buf(h.values.size());
        rf.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (rf.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
            throw IoError(raw + ": payload size does not match sidecar dims");
        for (size_t i = 0; i < buf.size(); ++i) {
            if (!std::isfinite(buf[i])) throw IoError(raw + ": non-finite heatmap value");
            h.values[i] = buf[i];
        }
        return h;
    }
    // 8-bit PNG/PGM treated as already normalized
    GrayImage img = load_gray(path);
    Heatmap h(img.width, img.height);
    h.values = img.pixels;
    return h;
}

void save_gray_png(const GrayImage& img, const std::string& path) {
    std::vector<uint8_t> rows(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i)
        rows[i] = static_cast<uint8_t>(std::clamp(img.pixels[i], 0.0, 255.0) + 0.5);
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 8, rows.data(),
              static_cast<size_t>(img.width));
}

void save_rgb_png(const RgbImage& img, const std::string& path) {
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, img.data.data(),
              static_cast<size_t>(img.width) * 3);
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double v : img.pixels)
        f.put(static_cast<char>(static_cast<uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5)));
}

void save_heatmap_raw(const Heatmap& h, const std::string& stem) {
    {
        std::ofstream f(stem + ".f32", std::ios::binary);
        if (!f) throw IoError("cannot write " + stem + ".f32");
        for (double v : h.values) {
            float fv = static_cast<float>(v);
            f.write(reinterpret_cast<const char*>(&fv), sizeof(float));
        }
    }
    nlohmann::json j{{"width", h.width}, {"height", h.height}, {"class_id", h.class_id}};
    std::ofstream f(stem + ".json");
    f << j.dump(2) << "\n";
}

}  // namespace xrad::io
