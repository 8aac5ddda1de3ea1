#pragma once

// Brute-force evaluators used to validate the closed-form moment assemblies:
// a Gaussian-state contraction enumerator over the kernel second moments, and
// a single-mode Fock-truncation oracle for the two-mode squeezed vacuum.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "homsim/kernels.hpp"

namespace homsim {

enum class Beam { signal, idler };
enum class SourceLabel { a, b };

struct OperatorDescriptor {
  bool dagger;
  Beam beam;
  SourceLabel source;
  double time;  // ps
};

// A normally-ordered operator product (all daggered operators first, equal
// numbers of daggered and undaggered descriptors).
struct MomentSpec {
  std::vector<OperatorDescriptor> ops;

  void validate() const {
    if (ops.size() % 2 != 0)
      throw std::invalid_argument("MomentSpec: zero-mean Gaussian moment of odd order vanishes; "
                                  "need equal creation/annihilation counts");
    std::size_t daggers = 0;
    bool seen_plain = false;
    for (const auto& op : ops) {
      if (op.dagger) {
        if (seen_plain)
          throw std::invalid_argument("MomentSpec: not normally ordered");
        ++daggers;
      } else {
        seen_plain = true;
      }
    }
    if (daggers * 2 != ops.size())
      throw std::invalid_argument("MomentSpec: creation/annihilation counts differ");
  }
};

namespace detail {

// Ordered second moment <d1 d2> of the twin-beam state, d1 preceding d2.
// Returns nullopt for structurally vanishing pairs. The pair moments come
// straight from kernel evaluations:
//   <a_s^dag(t1) a_s(t2)> = A(t2-t1)        <a_i^dag(t1) a_i(t2)> = A*(t2-t1)
//   <a_s(ts) a_i(ti)>     = -C(ts-ti)       <a_s^dag(ts) a_i^dag(ti)> = -C*(ts-ti)
// (the signs follow the squeezer convention and always cancel pairwise).
inline std::optional<std::complex<double>> pair_moment(const OperatorDescriptor& d1,
                                                       const OperatorDescriptor& d2,
                                                       const KernelSet& ksA,
                                                       const KernelSet& ksB) {
  if (d1.source != d2.source) return std::nullopt;
  const KernelSet& ks = d1.source == SourceLabel::a ? ksA : ksB;
  if (d1.dagger != d2.dagger) {
    // Normal ordering puts the daggered operator first; no commutator term.
    if (d1.beam != d2.beam) return std::nullopt;
    const double tau = d2.time - d1.time;
    const auto a = ks.eval_a(tau);
    return d1.beam == Beam::signal ? a : std::conj(a);
  }
  // Same character: only the signal-idler pair moment survives.
  if (d1.beam == d2.beam) return std::nullopt;
  const double ts = d1.beam == Beam::signal ? d1.time : d2.time;
  const double ti = d1.beam == Beam::signal ? d2.time : d1.time;
  const auto c = ks.eval_c(ts - ti);
  return d1.dagger ? -std::conj(c) : -c;
}

inline void enumerate_pairings(const MomentSpec& spec, const KernelSet& ksA, const KernelSet& ksB,
                               std::vector<bool>& used, std::complex<double> partial,
                               std::vector<std::complex<double>>& contributions) {
  std::size_t first = 0;
  while (first < used.size() && used[first]) ++first;
  if (first == used.size()) {
    contributions.push_back(partial);
    return;
  }
  used[first] = true;
  for (std::size_t j = first + 1; j < used.size(); ++j) {
    if (used[j]) continue;
    const auto m = pair_moment(spec.ops[first], spec.ops[j], ksA, ksB);
    if (!m) continue;
    used[j] = true;
    enumerate_pairings(spec, ksA, ksB, used, partial * *m, contributions);
    used[j] = false;
  }
  used[first] = false;
}

}  // namespace detail

// Contributions of all structurally admissible complete pairings; their sum
// is the Gaussian moment.
inline std::vector<std::complex<double>> wick_pairings(const MomentSpec& spec,
                                                       const KernelSet& ksA,
                                                       const KernelSet& ksB) {
  spec.validate();
  std::vector<std::complex<double>> contributions;
  std::vector<bool> used(spec.ops.size(), false);
  detail::enumerate_pairings(spec, ksA, ksB, used, {1.0, 0.0}, contributions);
  return contributions;
}

inline std::complex<double> wick_moment(const MomentSpec& spec, const KernelSet& ksA,
                                        const KernelSet& ksB) {
  std::complex<double> sum = 0.0;
  for (const auto& c : wick_pairings(spec, ksA, ksB)) sum += c;
  return sum;
}

enum class TmsvObservable { ns, ns_ni, ns_sq, g2_cross0, g2_marg0 };

// Expectation over the truncated two-mode squeezed vacuum
// sum_n tanh^n(r)/cosh(r) |n,n>. Single-frequency-bin limit oracle.
inline double fock_tmsv_moment(double r, int n_max, TmsvObservable observable) {
  if (!(r >= 0.0)) throw std::invalid_argument("fock_tmsv_moment: r must be >= 0");
  const double t2 = std::tanh(r) * std::tanh(r);
  if (r > 0.0 && std::pow(t2, n_max) >= 1e-12)
    throw std::invalid_argument("fock_tmsv_moment: truncation insufficient for this r");
  double norm = 0.0, n1 = 0.0, n2 = 0.0, nn1 = 0.0;
  double p = 1.0 / (std::cosh(r) * std::cosh(r));
  for (int n = 0; n <= n_max; ++n) {
    norm += p;
    n1 += p * n;
    n2 += p * static_cast<double>(n) * n;
    nn1 += p * static_cast<double>(n) * (n - 1);
    p *= t2;
  }
  n1 /= norm;
  n2 /= norm;
  nn1 /= norm;
  switch (observable) {
    case TmsvObservable::ns:
      return n1;
    case TmsvObservable::ns_ni:  // photon numbers are perfectly correlated
    case TmsvObservable::ns_sq:
      return n2;
    case TmsvObservable::g2_cross0:
      if (!(n1 > 0.0)) throw std::domain_error("fock_tmsv_moment: g2 undefined at zero flux");
      return n2 / (n1 * n1);
    case TmsvObservable::g2_marg0:
      if (!(n1 > 0.0)) throw std::domain_error("fock_tmsv_moment: g2 undefined at zero flux");
      return nn1 / (n1 * n1);
  }
  throw std::logic_error("fock_tmsv_moment: unknown observable");
}

}  // namespace homsim
