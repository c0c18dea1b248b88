#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdsl::sim {

using Amp = std::complex<double>;
/// Row-major 2x2 unitary.
using Mat2 = std::array<Amp, 4>;

enum class Pauli : uint8_t { I, X, Y, Z };
enum class Result : uint8_t { Zero, One };

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace gates {
Mat2 h();
Mat2 x();
Mat2 y();
Mat2 z();
Mat2 i();
Mat2 t();
Mat2 t_adj();
/// diag(1, exp(i*pi*numerator / 2^power)).
Mat2 r1frac(int64_t numerator, int64_t power);
Mat2 adjoint(const Mat2& m);
}  // namespace gates

/// Dense state-vector machine. Allocated qubits are ordered by id: the qubit
/// with the k-th smallest id is bit k of the amplitude index.
class Simulator {
 public:
  explicit Simulator(std::size_t capacity = 24, uint64_t seed = 0);

  std::size_t capacity() const { return capacity_; }
  std::size_t num_qubits() const { return ids_.size(); }
  const std::vector<uint32_t>& ids() const { return ids_; }
  const std::vector<Amp>& amplitudes() const { return amps_; }
  bool is_allocated(uint32_t id) const;
  std::size_t position(uint32_t id) const;

  /// Adds qubit `id` in |0>.
  void allocate(uint32_t id);
  /// Removes qubit `id`, projecting it onto |0>. Callers check prob_one first.
  void release(uint32_t id);

  void apply(const Mat2& u, uint32_t target, const std::vector<uint32_t>& controls = {});

  /// Probability that measuring the Pauli product yields Zero (+1 eigenvalue).
  double probability_zero(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets) const;
  Result measure(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets);
  /// Probability of |1> on one qubit.
  double prob_one(uint32_t id) const;

  /// Overwrites the amplitudes of the allocated register (same length).
  void set_amplitudes(std::vector<Amp> amps);

  /// Reduced density matrix (row-major, 2^k x 2^k) of the listed qubits, the
  /// first listed qubit being bit 0 of the row index.
  std::vector<Amp> reduced_density(const std::vector<uint32_t>& keep) const;

  void seed(uint64_t s) { rng_.seed(s); }
  double uniform();

  /// index:real,imag for each amplitude above 1e-12; the index is written
  /// as a bit string whose k-th character is the k-th allocated qubit.
  std::string dump() const;

 private:
  uint64_t bit(uint32_t id) const { return uint64_t{1} << position(id); }
  void check_targets(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets) const;
  // Applies the Pauli product to `in`, writing into `out`.
  void apply_pauli(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets, const std::vector<Amp>& in,
                   std::vector<Amp>& out) const;

  std::size_t capacity_;
  std::vector<uint32_t> ids_;  // sorted
  std::vector<Amp> amps_;
  std::mt19937_64 rng_;
};

}  // namespace qdsl::sim
