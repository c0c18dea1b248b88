#include "qdsl/sim/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace qdsl::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

uint64_t insert_zero_bit(uint64_t i, std::size_t p) {
  uint64_t low = i & ((uint64_t{1} << p) - 1);
  return low | ((i >> p) << (p + 1));
}

}  // namespace

namespace gates {

Mat2 h() {
  const double s = 1.0 / std::sqrt(2.0);
  return {Amp(s), Amp(s), Amp(s), Amp(-s)};
}
Mat2 x() { return {Amp(0), Amp(1), Amp(1), Amp(0)}; }
Mat2 y() { return {Amp(0), Amp(0, -1), Amp(0, 1), Amp(0)}; }
Mat2 z() { return {Amp(1), Amp(0), Amp(0), Amp(-1)}; }
Mat2 i() { return {Amp(1), Amp(0), Amp(0), Amp(1)}; }
Mat2 t() { return {Amp(1), Amp(0), Amp(0), std::polar(1.0, kPi / 4)}; }
Mat2 t_adj() { return {Amp(1), Amp(0), Amp(0), std::polar(1.0, -kPi / 4)}; }

Mat2 r1frac(int64_t numerator, int64_t power) {
  double angle = std::ldexp(kPi * static_cast<double>(numerator), static_cast<int>(-power));
  return {Amp(1), Amp(0), Amp(0), std::polar(1.0, angle)};
}

Mat2 adjoint(const Mat2& m) { return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}; }

}  // namespace gates

Simulator::Simulator(std::size_t capacity, uint64_t seed) : capacity_(capacity), amps_{Amp(1)}, rng_(seed) {}

bool Simulator::is_allocated(uint32_t id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

std::size_t Simulator::position(uint32_t id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) throw SimError("qubit " + std::to_string(id) + " is not allocated");
  return static_cast<std::size_t>(it - ids_.begin());
}

void Simulator::allocate(uint32_t id) {
  if (ids_.size() >= capacity_) {
    throw SimError("qubit capacity of " + std::to_string(capacity_) + " exceeded");
  }
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it != ids_.end() && *it == id) throw SimError("qubit " + std::to_string(id) + " is already allocated");
  std::size_t p = static_cast<std::size_t>(it - ids_.begin());
  ids_.insert(it, id);
  std::vector<Amp> next(amps_.size() * 2, Amp(0));
  for (uint64_t i = 0; i < amps_.size(); ++i) next[insert_zero_bit(i, p)] = amps_[i];
  amps_ = std::move(next);
}

void Simulator::release(uint32_t id) {
  std::size_t p = position(id);
  const uint64_t b = uint64_t{1} << p;
  const std::size_t half = amps_.size() / 2;
  double norm0 = 0;
  for (uint64_t j = 0; j < half; ++j) norm0 += std::norm(amps_[insert_zero_bit(j, p)]);
  // An exact |1> has nothing to project; keep the other branch instead.
  const uint64_t pick = norm0 > 1e-300 ? 0 : b;
  double norm = 0;
  std::vector<Amp> next(half);
  for (uint64_t j = 0; j < half; ++j) {
    next[j] = amps_[insert_zero_bit(j, p) | pick];
    norm += std::norm(next[j]);
  }
  if (norm > 0) {
    double s = 1.0 / std::sqrt(norm);
    for (auto& a : next) a *= s;
  }
  amps_ = std::move(next);
  ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(p));
}

void Simulator::apply(const Mat2& u, uint32_t target, const std::vector<uint32_t>& controls) {
  const uint64_t tb = bit(target);
  uint64_t cmask = 0;
  for (uint32_t c : controls) {
    uint64_t cb = bit(c);
    if (cb == tb || (cmask & cb)) throw SimError("duplicate qubit " + std::to_string(c) + " in gate application");
    cmask |= cb;
  }
  const std::size_t n = amps_.size();
  for (uint64_t i = 0; i < n; ++i) {
    if ((i & tb) || (i & cmask) != cmask) continue;
    Amp a0 = amps_[i];
    Amp a1 = amps_[i | tb];
    amps_[i] = u[0] * a0 + u[1] * a1;
    amps_[i | tb] = u[2] * a0 + u[3] * a1;
  }
}

void Simulator::check_targets(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets) const {
  if (paulis.size() != targets.size()) {
    throw SimError("Pauli array has " + std::to_string(paulis.size()) + " entries but there are " +
                   std::to_string(targets.size()) + " qubits");
  }
  uint64_t seen = 0;
  for (uint32_t t : targets) {
    uint64_t b = bit(t);
    if (seen & b) throw SimError("duplicate qubit " + std::to_string(t) + " in measurement");
    seen |= b;
  }
}

void Simulator::apply_pauli(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets,
                            const std::vector<Amp>& in, std::vector<Amp>& out) const {
  uint64_t xmask = 0;
  uint64_t zmask = 0;
  int ny = 0;
  for (std::size_t k = 0; k < paulis.size(); ++k) {
    uint64_t b = bit(targets[k]);
    switch (paulis[k]) {
      case Pauli::I: break;
      case Pauli::X: xmask |= b; break;
      case Pauli::Z: zmask |= b; break;
      case Pauli::Y:
        xmask |= b;
        zmask |= b;
        ++ny;
        break;
    }
  }
  // Y = i X Z, so P|i> = i^nY (-1)^{|i & zmask|} |i ^ xmask>.
  static const Amp powers[] = {Amp(1, 0), Amp(0, 1), Amp(-1, 0), Amp(0, -1)};
  const Amp phase = powers[ny % 4];
  out.assign(in.size(), Amp(0));
  for (uint64_t i = 0; i < in.size(); ++i) {
    Amp v = phase * in[i];
    if (std::popcount(i & zmask) & 1) v = -v;
    out[i ^ xmask] = v;
  }
}

double Simulator::probability_zero(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets) const {
  check_targets(paulis, targets);
  std::vector<Amp> p;
  apply_pauli(paulis, targets, amps_, p);
  Amp expectation(0);
  for (std::size_t i = 0; i < amps_.size(); ++i) expectation += std::conj(amps_[i]) * p[i];
  return std::clamp((1.0 + expectation.real()) / 2.0, 0.0, 1.0);
}

Result Simulator::measure(const std::vector<Pauli>& paulis, const std::vector<uint32_t>& targets) {
  check_targets(paulis, targets);
  bool trivial = std::all_of(paulis.begin(), paulis.end(), [](Pauli p) { return p == Pauli::I; });
  if (trivial) return Result::Zero;
  std::vector<Amp> p;
  apply_pauli(paulis, targets, amps_, p);
  Amp expectation(0);
  for (std::size_t i = 0; i < amps_.size(); ++i) expectation += std::conj(amps_[i]) * p[i];
  double p0 = std::clamp((1.0 + expectation.real()) / 2.0, 0.0, 1.0);
  Result r = uniform() < p0 ? Result::Zero : Result::One;
  const double sign = r == Result::Zero ? 1.0 : -1.0;
  const double prob = r == Result::Zero ? p0 : 1.0 - p0;
  const double scale = 1.0 / (2.0 * std::sqrt(std::max(prob, 1e-300)));
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] = (amps_[i] + sign * p[i]) * scale;
  return r;
}

double Simulator::prob_one(uint32_t id) const {
  const uint64_t b = bit(id);
  double p = 0;
  for (uint64_t i = 0; i < amps_.size(); ++i) {
    if (i & b) p += std::norm(amps_[i]);
  }
  return p;
}

std::vector<Amp> Simulator::reduced_density(const std::vector<uint32_t>& keep) const {
  const std::size_t k = keep.size();
  const std::size_t dim = std::size_t{1} << k;
  std::vector<uint64_t> kbits(k);
  uint64_t kmask = 0;
  for (std::size_t j = 0; j < k; ++j) {
    kbits[j] = bit(keep[j]);
    kmask |= kbits[j];
  }
  // Split every index into its kept part (as a k-bit row index) and the rest.
  std::vector<Amp> rho(dim * dim, Amp(0));
  const std::size_t n = amps_.size();
  std::vector<uint64_t> spread(dim, 0);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      if (r & (std::size_t{1} << j)) spread[r] |= kbits[j];
    }
  }
  for (uint64_t env = 0; env < n; ++env) {
    if (env & kmask) continue;
    for (std::size_t a = 0; a < dim; ++a) {
      Amp va = amps_[env | spread[a]];
      if (va == Amp(0)) continue;
      for (std::size_t b = 0; b < dim; ++b) rho[a * dim + b] += va * std::conj(amps_[env | spread[b]]);
    }
  }
  return rho;
}

void Simulator::set_amplitudes(std::vector<Amp> amps) {
  if (amps.size() != amps_.size()) throw SimError("state vector has the wrong length");
  amps_ = std::move(amps);
}

double Simulator::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::string Simulator::dump() const {
  std::ostringstream os;
  os.precision(17);
  const std::size_t n = ids_.size();
  for (uint64_t i = 0; i < amps_.size(); ++i) {
    if (std::abs(amps_[i]) <= 1e-12) continue;
    std::string bits(n, '0');
    for (std::size_t k = 0; k < n; ++k) {
      if (i & (uint64_t{1} << k)) bits[k] = '1';
    }
    if (n == 0) bits = "-";
    os << bits << ':' << amps_[i].real() << ',' << amps_[i].imag() << '\n';
  }
  return os.str();
}

}  // namespace qdsl::sim
