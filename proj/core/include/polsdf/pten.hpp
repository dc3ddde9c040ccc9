#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace polsdf {

// Dense row-major float tensor, the on-disk unit of every map the tools exchange.
//
// PTEN layout (little-endian):
//   4 bytes   magic "PTEN"
//   u32       rank
//   u32[rank] dims, outermost first
//   f32[prod(dims)] payload, row-major
struct Tensor {
    std::vector<uint32_t> dims;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<uint32_t> shape);

    size_t size() const { return data.size(); }
    size_t rank() const { return dims.size(); }

    float &operator[](size_t i) { return data[i]; }
    float operator[](size_t i) const { return data[i]; }

    // Row-major accessors for the common image layouts.
    float &at(size_t y, size_t x) { return data[y * dims[1] + x]; }
    float at(size_t y, size_t x) const { return data[y * dims[1] + x]; }
    float &at(size_t y, size_t x, size_t c) { return data[(y * dims[1] + x) * dims[2] + c]; }
    float at(size_t y, size_t x, size_t c) const { return data[(y * dims[1] + x) * dims[2] + c]; }

    bool operator==(const Tensor &) const = default;
};

size_t element_count(std::span<const uint32_t> dims);

void save_map(const std::filesystem::path &path, const Tensor &tensor);

// Throws DataError on bad magic, truncated payload, or trailing bytes.
Tensor load_map(const std::filesystem::path &path);

// Loads and checks that the tensor has exactly the given shape.
Tensor load_map(const std::filesystem::path &path, std::span<const uint32_t> expected_dims);

std::vector<uint8_t> encode_pten(const Tensor &tensor);
Tensor decode_pten(std::span<const uint8_t> bytes);

}  // namespace polsdf
