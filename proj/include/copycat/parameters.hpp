#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "copycat/ndiff.hpp"

namespace copycat::nd {

enum class Init : std::uint8_t {
  Matrix,  // Xavier uniform
  Vector,  // N(0, 0.1^2)
  Zero,
};

// Named, insertion-ordered collection of learned tensors with gradient
// accumulators. Entries must all be registered before any Tape binds to the
// store; the entry vector does not move afterwards.
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
    Init init = Init::Vector;
  };

  static constexpr std::uint32_t kFormatVersion = 1;

  Tensor& add(std::string name, std::size_t rows, std::size_t cols, Init init = Init::Matrix);
  Tensor& add(std::string name, std::size_t length, Init init = Init::Vector);

  bool contains(std::string_view name) const;
  Entry& entry(std::string_view name);
  const Entry& entry(std::string_view name) const;
  Tensor& value(std::string_view name) { return entry(name).value; }
  const Tensor& value(std::string_view name) const { return entry(name).value; }
  Tensor& grad(std::string_view name) { return entry(name).grad; }

  std::span<Entry> entries() { return entries_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t scalar_count() const;

  void initialize(std::uint64_t seed);
  void zero_grad();
  double grad_norm() const;

  // Binary layout: "NDPS", u32 version, u64 tensor count, then per tensor
  // u32 name length, name bytes, u32 rank, u64 dims, little-endian doubles.
  void save(std::ostream& out) const;
  static ParameterStore load(std::istream& in);

  // True when both stores hold the same names, shapes and bit patterns.
  bool identical_to(const ParameterStore& other) const;

 private:
  Entry& insert(Entry e);

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace copycat::nd
