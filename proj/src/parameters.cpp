#include "copycat/parameters.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace copycat::nd {

namespace {

constexpr std::array<char, 4> kMagic = {'N', 'D', 'P', 'S'};

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw std::runtime_error("parameter store: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

ParameterStore::Entry& ParameterStore::insert(Entry e) {
  if (index_.contains(e.name)) throw std::invalid_argument("duplicate parameter name: " + e.name);
  index_.emplace(e.name, entries_.size());
  entries_.push_back(std::move(e));
  return entries_.back();
}

Tensor& ParameterStore::add(std::string name, std::size_t rows, std::size_t cols, Init init) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("parameter dimensions must be positive");
  Entry e{std::move(name), Tensor(rows, cols), Tensor(rows, cols), init};
  return insert(std::move(e)).value;
}

Tensor& ParameterStore::add(std::string name, std::size_t length, Init init) {
  if (length == 0) throw std::invalid_argument("parameter dimensions must be positive");
  Entry e{std::move(name), Tensor(length), Tensor(length), init};
  return insert(std::move(e)).value;
}

bool ParameterStore::contains(std::string_view name) const { return index_.contains(std::string(name)); }

ParameterStore::Entry& ParameterStore::entry(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return entries_[it->second];
}

const ParameterStore::Entry& ParameterStore::entry(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return entries_[it->second];
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParameterStore::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& e : entries_) {
    switch (e.init) {
      case Init::Matrix: {
        const double fan_in = static_cast<double>(e.value.rank() == 2 ? e.value.cols() : 1);
        const double fan_out = static_cast<double>(e.value.rows());
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& v : e.value.values()) v = dist(rng);
        break;
      }
      case Init::Vector: {
        std::normal_distribution<double> dist(0.0, 0.1);
        for (double& v : e.value.values()) v = dist(rng);
        break;
      }
      case Init::Zero:
        e.value.fill(0.0);
        break;
    }
  }
}

void ParameterStore::zero_grad() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

double ParameterStore::grad_norm() const {
  double acc = 0.0;
  for (const auto& e : entries_)
    for (double g : e.grad.values()) acc += g * g;
  return std::sqrt(acc);
}

void ParameterStore::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kFormatVersion);
  write_le<std::uint64_t>(out, entries_.size());
  for (const auto& e : entries_) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    const auto shape = e.value.shape();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) write_le<std::uint64_t>(out, d);
    for (double v : e.value.values()) write_le<double>(out, v);
  }
  if (!out) throw std::runtime_error("parameter store: write failed");
}

ParameterStore ParameterStore::load(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("parameter store: bad magic");
  const auto version = read_le<std::uint32_t>(in);
  if (version != kFormatVersion)
    throw std::runtime_error("parameter store: unsupported format version " + std::to_string(version));
  const auto count = read_le<std::uint64_t>(in);
  ParameterStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_le<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto rank = read_le<std::uint32_t>(in);
    if (rank != 1 && rank != 2) throw std::runtime_error("parameter store: unsupported rank");
    std::vector<std::uint64_t> dims(rank);
    for (auto& d : dims) d = read_le<std::uint64_t>(in);
    Tensor& t = rank == 1 ? store.add(name, dims[0], Init::Vector)
                          : store.add(name, dims[0], dims[1], Init::Matrix);
    for (double& v : t.values()) v = read_le<double>(in);
  }
  return store;
}

bool ParameterStore::identical_to(const ParameterStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || !a.value.same_shape(b.value)) return false;
    if (std::memcmp(a.value.values().data(), b.value.values().data(), a.value.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

}  // namespace copycat::nd
