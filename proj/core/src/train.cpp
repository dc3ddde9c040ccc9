#include "polsdf/train.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

namespace polsdf {

void TrainConfig::validate() const {
    weights.validate();
    if (iterations < 1) throw Error("iterations must be at least 1");
    if (batch_size < 0) throw Error("batch_size must be nonnegative");
    if (grid_resolution < 2) throw Error("grid_resolution must be at least 2");
    if (sampler.samples < 2) throw Error("need at least 2 samples per ray");
    if (!(initial_sharpness > 0.0)) throw Error("initial_sharpness must be positive");
    if (!(lr_grid >= 0.0 && lr_sharpness >= 0.0)) throw Error("learning rates must be nonnegative");
    if (threads < 1) throw Error("threads must be at least 1");
    if (chunk_size < 1) throw Error("chunk_size must be at least 1");
    if (grid_levels < 1) throw Error("grid_levels must be at least 1");
    if (!(level_fraction >= 0.0 && level_fraction * (grid_levels - 1) < 1.0))
        throw Error("level_fraction * (grid_levels - 1) must lie in [0, 1)");
    if (level_resolution(0) < 2) throw Error("coarsest grid level has fewer than 2 vertices per axis");
}

int TrainConfig::level_start(int level) const {
    return level == 0 ? 0 : int(std::lround(level * level_fraction * iterations));
}

int TrainConfig::level_at(int iteration) const {
    int level = 0;
    while (level + 1 < grid_levels && iteration >= level_start(level + 1)) ++level;
    return level;
}

int TrainConfig::level_resolution(int level) const {
    const int shift = grid_levels - 1 - level;
    return int(std::lround(grid_resolution / std::ldexp(1.0, shift)));
}

Trainer::Trainer(const Dataset &data, TrainConfig config) : data_(data), config_(std::move(config)) {
    config_.validate();
    if (data_.views.empty()) throw DataError("dataset has no views");
    weights_ = config_.weights;
    toggles_ = ablation_toggles(config_.ablation, weights_);
    const int r = config_.level_resolution(0);
    field_ = SdfField::sphere_init(data_.bbox, {r, r, r}, config_.initial_sharpness);
    enter_level(0, false);
}

void Trainer::enter_level(int level, bool resample) {
    if (resample) {
        const int r = config_.level_resolution(level);
        field_ = field_.resampled({r, r, r});
    }
    level_ = level;
    m_.assign(field_.param_count(), 0.0);
    v_.assign(field_.param_count(), 0.0);
    grad_.assign(field_.param_count(), 0.0);
    touched_flag_.assign(field_.param_count(), 0);
}

double Trainer::learning_rate(double base) const {
    const double progress = double(iteration_) / double(config_.iterations);
    const double f = config_.lr_final_fraction;
    return base * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(kPi * std::min(progress, 1.0))));
}

LossRecord Trainer::step() {
    if (const int level = config_.level_at(iteration_); level != level_) enter_level(level, true);
    std::mt19937_64 rng(config_.seed * 0x9E3779B97F4A7C15ull + uint64_t(iteration_) + 1);

    struct PixelRef {
        int view, x, y;
    };
    std::vector<PixelRef> pixels;
    if (config_.batch_size == 0) {
        for (int v = 0; v < int(data_.views.size()); ++v)
            for (int y = 0; y < data_.views[v].camera.height; ++y)
                for (int x = 0; x < data_.views[v].camera.width; ++x) pixels.push_back({v, x, y});
    } else {
        std::uniform_int_distribution<int> pick_view(0, int(data_.views.size()) - 1);
        for (int i = 0; i < config_.batch_size; ++i) {
            const int v = pick_view(rng);
            const Camera &cam = data_.views[v].camera;
            std::uniform_int_distribution<int> px(0, cam.width - 1), py(0, cam.height - 1);
            const int x = px(rng);
            const int y = py(rng);
            pixels.push_back({v, x, y});
        }
    }

    std::vector<RaySamples> rays;
    std::vector<PixelTarget> targets;
    std::vector<int> views;
    rays.reserve(pixels.size());
    targets.reserve(pixels.size());
    for (const auto &p : pixels) {
        const View &view = data_.views[p.view];
        RaySamples ray = sample_ray(view.camera.center(), view.camera.pixel_direction(p.x, p.y), field_.bbox(),
                                    config_.sampler, &rng);
        if (ray.empty) continue;
        rays.push_back(std::move(ray));
        targets.push_back(view.target(p.x, p.y));
        views.push_back(p.view);
    }

    std::vector<RayJob> jobs(rays.size());
    std::vector<int> counts(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) {
        jobs[i] = {&rays[i], data_.views[views[i]].camera.image_axes(), &targets[i]};
        counts[i] = rays[i].size();
    }
    LossContext ctx{weights_, toggles_, cov_active_at(weights_, iteration_, config_.iterations),
                    batch_norms(targets, counts)};
    TapeOptions topts;
    topts.weight_cull = config_.weight_cull;

    const size_t chunk = size_t(config_.chunk_size);
    const size_t n_chunks = (jobs.size() + chunk - 1) / chunk;
    if (lists_.size() < n_chunks) lists_.resize(n_chunks);
    for (auto &l : lists_) l.clear();
    auto &lists = lists_;
    std::vector<LossBreakdown> parts(n_chunks);
    auto work = [&](size_t c) {
        const size_t begin = c * chunk, end = std::min(jobs.size(), begin + chunk);
        parts[c] = evaluate_batch(field_, std::span<const RayJob>(jobs).subspan(begin, end - begin), ctx, &lists[c],
                                  topts);
    };
    const int workers = std::min<int>(config_.threads, int(n_chunks));
    if (workers <= 1) {
        for (size_t c = 0; c < n_chunks; ++c) work(c);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (size_t c = size_t(t); c < n_chunks; c += size_t(workers)) work(c);
            });
        for (auto &th : pool) th.join();
    }

    LossRecord rec;
    rec.iteration = iteration_;
    for (const auto &p : parts) rec.loss += p;
    finalize_total(rec.loss, weights_);
    if (!std::isfinite(rec.loss.total))
        throw NumericalError("non-finite loss at iteration " + std::to_string(iteration_));

    touched_.clear();
    for (size_t c = 0; c < n_chunks; ++c) {
        const GradientList &list = lists[c];
        for (size_t k = 0; k < list.size(); ++k) {
            const uint32_t i = list.index[k];
            if (!touched_flag_[i]) {
                touched_flag_[i] = 1;
                touched_.push_back(i);
            }
            grad_[i] += list.value[k];
        }
    }
    for (uint32_t i : touched_) {
        if (!std::isfinite(grad_[i])) {
            for (uint32_t j : touched_) {
                grad_[j] = 0.0;
                touched_flag_[j] = 0;
            }
            throw NumericalError("non-finite gradient at parameter " + std::to_string(i) + ", iteration " +
                                 std::to_string(iteration_));
        }
    }

    // Adam on the touched parameters only; untouched moments stay frozen.
    const double t = double(iteration_ - config_.level_start(level_) + 1);
    const double bc1 = 1.0 - std::pow(config_.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(config_.adam_beta2, t);
    const double lr_grid = learning_rate(config_.lr_grid);
    const double lr_sharp = learning_rate(config_.lr_sharpness);
    const uint32_t sharp = field_.sharpness_param();
    for (uint32_t i : touched_) {
        const double g = grad_[i];
        m_[i] = config_.adam_beta1 * m_[i] + (1.0 - config_.adam_beta1) * g;
        v_[i] = config_.adam_beta2 * v_[i] + (1.0 - config_.adam_beta2) * g * g;
        const double lr = i == sharp ? lr_sharp : lr_grid;
        field_.param(i) -= lr * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + config_.adam_epsilon);
        grad_[i] = 0.0;
        touched_flag_[i] = 0;
    }
    ++iteration_;
    return rec;
}

void Trainer::run(const std::function<void(const LossRecord &)> &on_step) {
    while (iteration_ < config_.iterations) {
        const LossRecord r = step();
        if (on_step) on_step(r);
    }
}

namespace {

constexpr char kStateMagic[4] = {'P', 'S', 'T', 'A'};
constexpr uint32_t kStateVersion = 2;

static_assert(std::endian::native == std::endian::little, "state files are written little-endian");

template <class T>
void put(std::ofstream &out, const T &v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream &in) {
    T v{};
    if (!in.read(reinterpret_cast<char *>(&v), sizeof(T))) throw DataError("truncated optimizer state");
    return v;
}

}  // namespace

// state.bin: "PSTA", u32 version, u64 next iteration, u32 level, u32[3] grid
// resolution, u64 parameter count n, then f64[n] parameters, f64[n] first
// moments, f64[n] second moments.
void Trainer::save_checkpoint(const std::filesystem::path &dir) const {
    save_field(dir, field_);
    std::ofstream out(dir / "state.bin", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "state.bin").string());
    out.write(kStateMagic, 4);
    put(out, kStateVersion);
    put(out, uint64_t(iteration_));
    put(out, uint32_t(level_));
    for (int r : field_.resolution()) put(out, uint32_t(r));
    const uint64_t n = field_.param_count();
    put(out, n);
    for (uint64_t i = 0; i < n; ++i) put(out, field_.param(i));
    out.write(reinterpret_cast<const char *>(m_.data()), std::streamsize(n * sizeof(double)));
    out.write(reinterpret_cast<const char *>(v_.data()), std::streamsize(n * sizeof(double)));
    if (!out) throw Error("failed writing optimizer state");
}

void Trainer::load_checkpoint(const std::filesystem::path &dir) {
    std::ifstream in(dir / "state.bin", std::ios::binary);
    if (!in) throw DataError("missing " + (dir / "state.bin").string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kStateMagic, 4) != 0) throw DataError("bad optimizer state magic");
    if (get<uint32_t>(in) != kStateVersion) throw DataError("unsupported optimizer state version");
    const uint64_t iteration = get<uint64_t>(in);
    const uint32_t level = get<uint32_t>(in);
    std::array<int, 3> res;
    for (int &r : res) r = int(get<uint32_t>(in));
    if (int(level) >= config_.grid_levels || config_.level_at(int(iteration) - 1) != int(level))
        throw DataError("optimizer state does not match the configured grid schedule");
    const int expected = config_.level_resolution(int(level));
    if (res != std::array<int, 3>{expected, expected, expected})
        throw DataError("optimizer state does not match the grid resolution");
    field_ = SdfField(data_.bbox, res);
    enter_level(int(level), false);
    const uint64_t n = get<uint64_t>(in);
    if (n != field_.param_count()) throw DataError("optimizer state does not match the grid resolution");
    for (uint64_t i = 0; i < n; ++i) field_.param(i) = get<double>(in);
    if (!in.read(reinterpret_cast<char *>(m_.data()), std::streamsize(n * sizeof(double))) ||
        !in.read(reinterpret_cast<char *>(v_.data()), std::streamsize(n * sizeof(double))))
        throw DataError("truncated optimizer state");
    if (in.peek() != std::ifstream::traits_type::eof()) throw DataError("trailing bytes in optimizer state");
    iteration_ = int(iteration);
}

std::string loss_csv_header() { return "iteration,color,mean,cov,eik,mask,total"; }

std::string loss_csv_row(const LossRecord &r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.iteration, r.loss.color, r.loss.mean,
                  r.loss.cov, r.loss.eikonal, r.loss.mask, r.loss.total);
    return buf;
}

}  // namespace polsdf
