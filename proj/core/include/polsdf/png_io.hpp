#pragma once

#include <filesystem>
#include <vector>

namespace polsdf {

// Float image with interleaved channels, values nominally in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c) : width(w), height(h), channels(c), data(size_t(w) * h * c, 0.0f) {}

    float &at(int y, int x, int c) { return data[(size_t(y) * width + x) * channels + c]; }
    float at(int y, int x, int c) const { return data[(size_t(y) * width + x) * channels + c]; }
};

// Writes 1 (gray) or 3 (RGB) channel images; values are clamped to [0, 1] and quantized.
void write_png(const std::filesystem::path &path, const Image &image, int bit_depth = 8);

// Reads 8/16-bit gray, gray+alpha, RGB or RGBA PNGs; alpha is dropped.
Image read_png(const std::filesystem::path &path);

}  // namespace polsdf
