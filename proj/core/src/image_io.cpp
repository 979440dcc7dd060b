// Copyright 2026 The VeilForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "veilforge/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

std::uint8_t to_byte(double v) {
    const double r = std::lround(std::fmin(std::fmax(v, 0.0), 1.0) * 255.0);
    return static_cast<std::uint8_t>(r);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---- PNG ----------------------------------------------------------------

ImageTensor load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported channel count after expansion");
    }

    const std::size_t stride = static_cast<std::size_t>(w) * channels;
    bytes.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor img(static_cast<int>(h), static_cast<int>(w), channels);
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = bytes[i] / 255.0;
    return img;
}

void save_png(const std::string& path, const ImageTensor& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8,
                 img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
    bytes.resize(stride * img.height());
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) bytes[i] = to_byte(d[i]);
    rows.resize(img.height());
    for (int y = 0; y < img.height(); ++y) rows[y] = bytes.data() + y * stride;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- binary PNM ---------------------------------------------------------

int pnm_read_token(std::istream& in) {
    // Skips whitespace and '#' comments.
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    in >> value;
    return value;
}

ImageTensor load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[2];
    in.read(magic, 2);
    const bool gray = magic[1] == '5';
    const bool rgb = magic[1] == '6';
    if (magic[0] != 'P' || (!gray && !rgb)) {
        throw IoError(path + ": not a binary PGM/PPM file");
    }
    const int w = pnm_read_token(in);
    const int h = pnm_read_token(in);
    const int maxval = pnm_read_token(in);
    in.get(); // single whitespace before raster
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
        throw IoError(path + ": unsupported PNM geometry");
    }
    const int channels = rgb ? 3 : 1;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw IoError(path + ": truncated raster");

    ImageTensor img(h, w, channels);
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = bytes[i] / static_cast<double>(maxval);
    return img;
}

void save_pnm(const std::string& path, const ImageTensor& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << (img.channels() == 3 ? "P6\n" : "P5\n") << img.width() << " " << img.height() << "\n255\n";
    std::vector<std::uint8_t> bytes(img.size());
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) bytes[i] = to_byte(d[i]);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

ImageTensor load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    unsigned char sig[8] = {};
    probe.read(reinterpret_cast<char*>(sig), 8);
    probe.close();
    if (sig[0] == 0x89 && sig[1] == 'P' && sig[2] == 'N' && sig[3] == 'G') {
        return load_png(path);
    }
    if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) {
        return load_pnm(path);
    }
    if (sig[0] == 'V' && sig[1] == 'F' && sig[2] == 'T' && sig[3] == '1') {
        return load_vft1(path);
    }
    throw IoError(path + ": unrecognized image format");
}

void save_image(const std::string& path, const ImageTensor& img) {
    if (has_suffix(path, ".png")) {
        save_png(path, img);
    } else if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm")) {
        if (has_suffix(path, ".ppm") && img.channels() != 3) {
            throw ValueError("save_image: .ppm requires a 3-channel tensor");
        }
        if (has_suffix(path, ".pgm") && img.channels() != 1) {
            throw ValueError("save_image: .pgm requires a 1-channel tensor");
        }
        save_pnm(path, img);
    } else if (has_suffix(path, ".vft1")) {
        save_vft1(path, img);
    } else {
        throw ValueError("save_image: unsupported extension in " + path);
    }
}

ImageTensor load_vft1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VFT1", 4) != 0) {
        throw IoError(path + ": missing VFT1 magic");
    }
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw IoError(path + ": truncated header");
    ImageTensor img(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
    std::vector<float> raw(img.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) throw IoError(path + ": truncated data");
    auto d = img.data();
    for (std::size_t i = 0; i < raw.size(); ++i) d[i] = static_cast<double>(raw[i]);
    return img;
}

void save_vft1(const std::string& path, const ImageTensor& img) {
    static_assert(sizeof(float) == 4);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write("VFT1", 4);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(img.height()),
                                   static_cast<std::uint32_t>(img.width()),
                                   static_cast<std::uint32_t>(img.channels())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    std::vector<float> raw(img.size());
    auto d = img.data();
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<float>(d[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
}

} // namespace veilforge
