#pragma once

// Checkpointed antiderivative F(T) = int_0^T Z(u)^2 du.
//
// Checkpoints sit on a uniform grid t_i = i * step (step <= 1). Every block
// of `block` consecutive checkpoint cells carries one Chebyshev interpolant
// of Z^2 whose degree is set by the local oscillation rate ln(t / 2pi) and
// confirmed by the decay of its coefficients. F at any point is the
// checkpoint value at the block start plus the partial integral of the
// block's interpolant, so F is continuous and F' equals the interpolant.
// Long blocks need far fewer Z evaluations per unit length than short ones
// for the same accuracy.
//
// Construction is single-writer. Queries rebuild block interpolants on
// demand (deterministically, identical to construction) and memoize them
// behind a mutex, so a const table is safe to share between threads.
//
// Cache file layout (little-endian, native IEEE-754 doubles):
//
//   char[8]  magic "LLZ2TAB\0"
//   u32      format version
//   u32      checkpoint cells per interpolant block
//   f64      tol
//   f64      t_max
//   f64      step
//   i32      Riemann-Siegel correction index
//   f64      Riemann-Siegel switch ordinate
//   u64      row count n
//   n x (f64 t_i, f64 F(t_i))
//   u64      FNV-1a 64 checksum of every preceding byte

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ladderlab/chebyshev.hpp"
#include "ladderlab/errors.hpp"
#include "ladderlab/summation.hpp"
#include "ladderlab/zeta.hpp"

namespace ladderlab {

struct TableSettings {
  /// Relative tolerance of cell integrals.
  double tol = 1e-8;
  /// Checkpoint spacing.
  double step = 1.0;
  /// Checkpoint cells per interpolant.
  int block = 16;
  ZEvaluatorConfig z{};
  /// Worker threads for construction; results do not depend on it.
  int threads = 1;

  void validate() const {
    if (!(tol > 0.0 && tol <= 1e-3)) throw DomainError("TableSettings: tol must be in (0, 1e-3]");
    if (!(step > 0.0 && step <= 1.0)) throw DomainError("TableSettings: step must be in (0, 1]");
    if (block < 1 || block > 64) throw DomainError("TableSettings: block must be in [1, 64]");
    if (threads < 1) throw DomainError("TableSettings: threads must be >= 1");
    z.validate();
  }
};

class CumulativeZ2Table {
 public:
  static constexpr std::uint32_t kVersion = 1;

  /// Tabulates F on [0, t_max].
  static CumulativeZ2Table build(double t_max, const TableSettings& settings = {}) {
    settings.validate();
    if (!(t_max >= settings.step)) throw DomainError("CumulativeZ2Table: t_max must cover at least one cell");
    CumulativeZ2Table table(settings);
    table.values_ = {0.0};
    table.extend_to(t_max);
    return table;
  }

  CumulativeZ2Table(CumulativeZ2Table&&) noexcept = default;
  CumulativeZ2Table& operator=(CumulativeZ2Table&&) noexcept = default;

  /// Appends whole blocks until t_max is covered. Not thread-safe.
  void extend_to(double t_max) {
    const auto wanted = static_cast<std::size_t>(std::ceil(t_max / settings_.step - 1e-9));
    const std::size_t per = block_size();
    const std::size_t have = cells() / per;
    const std::size_t target = (wanted + per - 1) / per;
    if (target <= have) return;
    std::vector<std::vector<double>> partials(target - have);
    const auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const ChebyshevCell c = make_block(have + k);
        auto& row = partials[k];
        row.resize(per);
        for (std::size_t j = 1; j < per; ++j) row[j - 1] = c.integral_to(grid((have + k) * per + j));
        row[per - 1] = c.integral();
      }
    };
    const std::size_t n_threads = std::min<std::size_t>(settings_.threads, partials.size());
    if (n_threads <= 1) {
      work(0, partials.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (partials.size() + n_threads - 1) / n_threads;
      for (std::size_t w = 0; w < n_threads; ++w)
        pool.emplace_back(work, std::min(partials.size(), w * chunk), std::min(partials.size(), (w + 1) * chunk));
      for (auto& th : pool) th.join();
    }
    values_.resize(target * per + 1);
    CompensatedSum acc;
    acc.add(values_[have * per]);
    for (std::size_t k = 0; k < partials.size(); ++k) {
      const std::size_t base = (have + k) * per;
      const double start = acc.value();
      for (std::size_t j = 1; j < per; ++j) values_[base + j] = start + partials[k][j - 1];
      acc.add(partials[k][per - 1]);
      values_[base + per] = acc.value();
    }
  }

  const TableSettings& settings() const { return settings_; }
  double tol() const { return settings_.tol; }
  double step() const { return settings_.step; }
  std::size_t cells() const { return values_.size() - 1; }
  double t_max() const { return static_cast<double>(cells()) * settings_.step; }
  double grid(std::size_t i) const { return static_cast<double>(i) * settings_.step; }
  const std::vector<double>& values() const { return values_; }
  std::size_t block_size() const { return static_cast<std::size_t>(settings_.block); }

  /// F(T) = int_0^T Z^2.
  double operator()(double T) const {
    if (!(T >= 0.0)) throw DomainError("cumulative_z2: requires T >= 0");
    if (T > t_max()) throw RangeError("cumulative_z2: T = " + detail::fmt_value(T) + " beyond table coverage " +
                                      detail::fmt_value(t_max()));
    const std::size_t k = block_index(T);
    const std::size_t i = k * block_size();
    if (T == grid(i)) return values_[i];
    return values_[i] + block(k)->integral_to(T);
  }

  /// dF/dT, the interpolated Z^2.
  double density(double T) const {
    if (!(T >= 0.0 && T <= t_max())) throw RangeError("cumulative_z2: density outside table coverage");
    return block(block_index(T))->value(T);
  }

  /// The interpolant on block k (shared, memoized).
  std::shared_ptr<const ChebyshevCell> block(std::size_t k) const {
    {
      std::lock_guard lock(cache_->mu);
      auto it = cache_->cells.find(k);
      if (it != cache_->cells.end()) return it->second;
    }
    auto built = std::make_shared<const ChebyshevCell>(make_block(k));
    std::lock_guard lock(cache_->mu);
    if (cache_->cells.size() >= kCacheCapacity) cache_->cells.clear();
    cache_->cells.emplace(k, built);
    return built;
  }

  // -- persistence ----------------------------------------------------------

  void save(const std::filesystem::path& path) const {
    std::string buf;
    put(buf, kMagic, sizeof kMagic);
    put_pod(buf, kVersion);
    put_pod(buf, static_cast<std::uint32_t>(settings_.block));
    put_pod(buf, settings_.tol);
    put_pod(buf, t_max());
    put_pod(buf, settings_.step);
    put_pod(buf, static_cast<std::int32_t>(settings_.z.rs_correction_terms));
    put_pod(buf, settings_.z.t_switch);
    put_pod(buf, static_cast<std::uint64_t>(values_.size()));
    for (std::size_t i = 0; i < values_.size(); ++i) {
      put_pod(buf, grid(i));
      put_pod(buf, values_[i]);
    }
    put_pod(buf, fnv1a(buf));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw CacheError("cache_save: cannot open " + tmp.string());
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (!out) throw CacheError("cache_save: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  /// Loads a cache file; the stored tol and evaluator settings must match
  /// `expected` exactly.
  static CumulativeZ2Table load(const std::filesystem::path& path, const TableSettings& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cache_load: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    constexpr std::size_t kHeader = 8 + 4 + 4 + 8 + 8 + 8 + 4 + 8 + 8;
    if (buf.size() < kHeader + 8) throw CacheError("cache_load: file too short");
    std::uint64_t stored_sum;
    std::memcpy(&stored_sum, buf.data() + buf.size() - 8, 8);
    if (stored_sum != fnv1a(std::string_view(buf).substr(0, buf.size() - 8)))
      throw CacheError("cache_load: checksum mismatch in " + path.string());
    std::size_t pos = 0;
    if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) throw CacheError("cache_load: bad magic");
    pos += sizeof kMagic;
    const auto version = get_pod<std::uint32_t>(buf, pos);
    if (version != kVersion)
      throw CacheError("cache_load: version mismatch (file " + std::to_string(version) + ", expected " +
                       std::to_string(kVersion) + ")");
    TableSettings s = expected;
    s.block = static_cast<int>(get_pod<std::uint32_t>(buf, pos));
    s.tol = get_pod<double>(buf, pos);
    const double t_max = get_pod<double>(buf, pos);
    s.step = get_pod<double>(buf, pos);
    s.z.rs_correction_terms = get_pod<std::int32_t>(buf, pos);
    s.z.t_switch = get_pod<double>(buf, pos);
    if (s.tol != expected.tol)
      throw CacheError("cache_load: tol mismatch (file " + detail::fmt_value(s.tol) + ", expected " +
                       detail::fmt_value(expected.tol) + ")");
    if (s.step != expected.step || s.block != expected.block) throw CacheError("cache_load: grid policy mismatch");
    if (!(s.z == expected.z)) throw CacheError("cache_load: Z evaluator settings mismatch");
    const auto rows = get_pod<std::uint64_t>(buf, pos);
    if (buf.size() != kHeader + rows * 16 + 8) throw CacheError("cache_load: row count does not match file size");
    CumulativeZ2Table table(s);
    table.values_.resize(rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
      const double t = get_pod<double>(buf, pos);
      if (t != table.grid(i)) throw CacheError("cache_load: grid row " + std::to_string(i) + " off the uniform grid");
      table.values_[i] = get_pod<double>(buf, pos);
    }
    if (rows < 2 || (rows - 1) % table.block_size() != 0 || table.t_max() != t_max) throw CacheError("cache_load: inconsistent coverage");
    return table;
  }

 private:
  static constexpr char kMagic[8] = {'L', 'L', 'Z', '2', 'T', 'A', 'B', '\0'};
  static constexpr std::size_t kCacheCapacity = 1u << 13;
  static constexpr int kMaxDegree = 320;

  struct CellCache {
    std::mutex mu;
    std::unordered_map<std::size_t, std::shared_ptr<const ChebyshevCell>> cells;
  };

  explicit CumulativeZ2Table(const TableSettings& s) : settings_(s), eval_(s.z), cache_(std::make_unique<CellCache>()) {}

  std::size_t block_index(double T) const {
    const auto i = static_cast<std::size_t>(std::floor(T / settings_.step));
    return std::min(i / block_size(), cells() / block_size() - 1);
  }

  ChebyshevCell make_block(std::size_t k) const {
    const double a = grid(k * block_size());
    const double b = grid((k + 1) * block_size());
    // below t = 2 the integrand is continued by the constant Z(2)^2; that
    // stretch carries no ladder content
    const auto f = [&](double t) { return eval_.squared(std::max(t, 2.0)); };
    // Z^2 oscillates at up to omega = ln(t / 2pi) rad per unit t, which is
    // omega (b - a) / 2 on the unit interval; Chebyshev coefficients die off
    // a few dozen orders beyond that
    const double omega = std::log(std::max(b, kTwoPi * 2.718281828459045) / kTwoPi);
    const double w = 0.5 * omega * (b - a);
    int n = std::max(12, 8 * static_cast<int>(std::ceil((w + 28.0) / 8.0)));
    // sample abscissae are rounded to doubles, which puts a noise floor of
    // about omega * ulp(t) under the coefficients; asking for less is futile
    const double noise = 4.0 * omega * std::numeric_limits<double>::epsilon() * b;
    const double tail_tol = std::max(std::min(1e-12, 1e-4 * settings_.tol), noise);
    ChebyshevCell cell;
    for (;;) {
      cell = ChebyshevCell::fit(f, a, b, n);
      if (cell.tail() <= tail_tol * cell.max_coefficient() || n >= kMaxDegree) break;
      n = std::min(kMaxDegree, n + 16);
    }
    return cell;
  }

  static void put(std::string& buf, const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); }
  template <class T>
  static void put_pod(std::string& buf, const T& v) {
    put(buf, &v, sizeof v);
  }
  template <class T>
  static T get_pod(const std::string& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) throw CacheError("cache_load: truncated file");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof v);
    pos += sizeof v;
    return v;
  }
  static std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  TableSettings settings_;
  ZEvaluator eval_;
  std::vector<double> values_;
  std::unique_ptr<CellCache> cache_;
};

/// Writes a table to `path` atomically.
inline void cache_save(const CumulativeZ2Table& table, const std::filesystem::path& path) { table.save(path); }

inline CumulativeZ2Table cache_load(const std::filesystem::path& path, const TableSettings& expected = {}) {
  return CumulativeZ2Table::load(path, expected);
}

}  // namespace ladderlab
