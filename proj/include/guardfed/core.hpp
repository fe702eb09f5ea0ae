#ifndef GUARDFED_CORE_HPP
#define GUARDFED_CORE_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace guardfed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexList = std::vector<std::size_t>;
using Bits = std::vector<std::uint8_t>;

/// All randomness flows through this engine; std distributions on top of it
/// are deterministic for a fixed standard library.
using Rng = std::mt19937_64;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fairness metric whose conditioning group is empty.
class UndefinedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable named seed stream: derive_seed(master, "train", {round, client}).
/// Streams with different names or indices are independent of each other.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = splitmix64(master ^ splitmix64(h));
  for (std::uint64_t i : indices) s = splitmix64(s ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace guardfed

#endif  // GUARDFED_CORE_HPP
