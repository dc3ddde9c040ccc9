#pragma once

#include <cassert>
#include <vector>

namespace polsdf {

// Row-major 2D map of per-pixel values.
template <class T>
struct PixelMap {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    PixelMap() = default;
    PixelMap(int w, int h, T fill = T{}) : width(w), height(h), data(size_t(w) * size_t(h), fill) {}

    size_t size() const { return data.size(); }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    T &operator()(int x, int y) {
        assert(contains(x, y));
        return data[size_t(y) * width + x];
    }
    const T &operator()(int x, int y) const {
        assert(contains(x, y));
        return data[size_t(y) * width + x];
    }
};

using ScalarMap = PixelMap<double>;

}  // namespace polsdf
