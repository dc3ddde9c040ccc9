#include "polsdf/pten.hpp"

#include "polsdf/common.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

namespace polsdf {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'E', 'N'};

void put_u32(std::vector<uint8_t> &out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t *p) {
    return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
}

}  // namespace

Tensor::Tensor(std::vector<uint32_t> shape) : dims(std::move(shape)), data(element_count(dims), 0.0f) {}

size_t element_count(std::span<const uint32_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), size_t{1},
                           [](size_t a, uint32_t b) { return a * b; });
}

std::vector<uint8_t> encode_pten(const Tensor &tensor) {
    if (tensor.data.size() != element_count(tensor.dims))
        throw DataError("tensor payload does not match its dims");
    std::vector<uint8_t> out;
    out.reserve(8 + 4 * tensor.dims.size() + 4 * tensor.data.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, static_cast<uint32_t>(tensor.dims.size()));
    for (uint32_t d : tensor.dims) put_u32(out, d);
    for (float f : tensor.data) put_u32(out, std::bit_cast<uint32_t>(f));
    return out;
}

Tensor decode_pten(std::span<const uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataError("PTEN: bad magic");
    const uint32_t rank = get_u32(bytes.data() + 4);
    size_t offset = 8;
    if (bytes.size() < offset + 4 * size_t(rank)) throw DataError("PTEN: truncated header");
    Tensor t;
    t.dims.resize(rank);
    for (uint32_t i = 0; i < rank; ++i, offset += 4) t.dims[i] = get_u32(bytes.data() + offset);
    const size_t n = element_count(t.dims);
    if (bytes.size() - offset < 4 * n) throw DataError("PTEN: truncated payload");
    if (bytes.size() - offset > 4 * n) throw DataError("PTEN: trailing bytes after payload");
    t.data.resize(n);
    for (size_t i = 0; i < n; ++i, offset += 4)
        t.data[i] = std::bit_cast<float>(get_u32(bytes.data() + offset));
    return t;
}

void save_map(const std::filesystem::path &path, const Tensor &tensor) {
    const auto bytes = encode_pten(tensor);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path.string());
}

Tensor load_map(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_pten(bytes);
    } catch (const DataError &e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

Tensor load_map(const std::filesystem::path &path, std::span<const uint32_t> expected_dims) {
    Tensor t = load_map(path);
    if (!std::equal(t.dims.begin(), t.dims.end(), expected_dims.begin(), expected_dims.end()))
        throw DataError(path.string() + ": dimension mismatch");
    return t;
}

}  // namespace polsdf
