#pragma once

// Constitutive models for the two phases: free energy psi(theta) from the
// family a + b*theta - c*theta*log(theta) + p(theta), plus polynomial
// viscosity and conductivity laws. Everything else (entropy, internal
// energy, heat capacity, latent heat) is derived from psi.

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "interphase/error.hpp"

namespace interphase {

/// Dense polynomial sum_k coeffs[k] * x^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
  }

  std::span<const double> coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

 private:
  std::vector<double> coeffs_;
};

struct ThetaRange {
  double min = 0.0;
  double max = 0.0;

  bool contains(double theta) const { return theta >= min && theta <= max; }
};

struct FreeEnergyCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::vector<double> poly;  // tail p(theta), ascending powers
};

struct ThermoState {
  double psi = 0.0;
  double eta = 0.0;      // entropy, -psi'
  double epsilon = 0.0;  // internal energy, psi + theta*eta
  double kappa = 0.0;    // heat capacity, -theta*psi''
  double mu = 0.0;
  double d = 0.0;
};

inline constexpr int kPositivitySamples = 1024;

/// One phase. Construction validates kappa, mu, d > 0 on an equispaced
/// sample of the validity range and throws InvalidModel otherwise.
class PhaseModel {
 public:
  PhaseModel(FreeEnergyCoeffs psi, Polynomial mu, Polynomial d, ThetaRange range)
      : psi_(std::move(psi)),
        tail_(psi_.poly),
        tail_d1_(tail_.derivative()),
        tail_d2_(tail_d1_.derivative()),
        tail_d3_(tail_d2_.derivative()),
        mu_(std::move(mu)),
        d_(std::move(d)),
        range_(range) {
    if (!(range_.min > 0.0) || !(range_.max > range_.min)) {
      throw Error(ErrorKind::InvalidModel, "theta_range must satisfy 0 < min < max");
    }
    for (int i = 0; i < kPositivitySamples; ++i) {
      const double theta =
          range_.min + (range_.max - range_.min) * static_cast<double>(i) / (kPositivitySamples - 1);
      if (!(kappa(theta) > 0.0)) {
        std::ostringstream os;
        os << "heat capacity kappa = " << kappa(theta) << " <= 0 at theta = " << theta;
        throw Error(ErrorKind::InvalidModel, os.str());
      }
      if (!(mu_(theta) > 0.0)) {
        std::ostringstream os;
        os << "viscosity mu <= 0 at theta = " << theta;
        throw Error(ErrorKind::InvalidModel, os.str());
      }
      if (!(d_(theta) > 0.0)) {
        std::ostringstream os;
        os << "conductivity d <= 0 at theta = " << theta;
        throw Error(ErrorKind::InvalidModel, os.str());
      }
    }
  }

  /// Constant viscosity and conductivity.
  static PhaseModel simple(double a, double b, double c, ThetaRange range, double mu = 1.0,
                           double d = 1.0, std::vector<double> poly = {}) {
    return PhaseModel(FreeEnergyCoeffs{a, b, c, std::move(poly)}, Polynomial({mu}), Polynomial({d}),
                      range);
  }

  double psi(double theta) const {
    return psi_.a + psi_.b * theta - psi_.c * theta * std::log(theta) + tail_(theta);
  }
  double dpsi(double theta) const {
    return psi_.b - psi_.c * (std::log(theta) + 1.0) + tail_d1_(theta);
  }
  double d2psi(double theta) const { return -psi_.c / theta + tail_d2_(theta); }
  double d3psi(double theta) const { return psi_.c / (theta * theta) + tail_d3_(theta); }

  double eta(double theta) const { return -dpsi(theta); }
  double epsilon(double theta) const { return psi(theta) + theta * eta(theta); }
  double kappa(double theta) const { return -theta * d2psi(theta); }
  double mu(double theta) const { return mu_(theta); }
  double conductivity(double theta) const { return d_(theta); }

  const ThetaRange& range() const { return range_; }
  const FreeEnergyCoeffs& coeffs() const { return psi_; }

 private:
  FreeEnergyCoeffs psi_;
  Polynomial tail_, tail_d1_, tail_d2_, tail_d3_;
  Polynomial mu_;
  Polynomial d_;
  ThetaRange range_;
};

inline ThermoState eval_phase(const PhaseModel& model, double theta) {
  if (!model.range().contains(theta)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside [" << model.range().min << ", " << model.range().max
       << "]";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  ThermoState s;
  s.psi = model.psi(theta);
  s.eta = model.eta(theta);
  s.epsilon = s.psi + theta * s.eta;
  s.kappa = model.kappa(theta);
  s.mu = model.mu(theta);
  s.d = model.conductivity(theta);
  if (!(s.kappa > 0.0)) throw Error(ErrorKind::InvalidModel, "kappa <= 0");
  return s;
}

struct JumpState {
  double psi_jump = 0.0;   // psi_2 - psi_1
  double dpsi_jump = 0.0;  // psi_2' - psi_1'
  double latent_heat = 0.0;
};

/// phase1 is the disperse phase (inside the interface). Jumps are taken as
/// outer minus inner.
class MaterialPair {
 public:
  MaterialPair(PhaseModel phase1, PhaseModel phase2, double sigma)
      : phase1_(std::move(phase1)), phase2_(std::move(phase2)), sigma_(sigma) {
    if (!(sigma_ > 0.0)) throw Error(ErrorKind::InvalidModel, "surface tension sigma must be > 0");
    common_.min = std::max(phase1_.range().min, phase2_.range().min);
    common_.max = std::min(phase1_.range().max, phase2_.range().max);
    if (!(common_.max > common_.min)) {
      throw Error(ErrorKind::InvalidModel, "phase theta ranges do not overlap");
    }
  }

  const PhaseModel& phase1() const { return phase1_; }
  const PhaseModel& phase2() const { return phase2_; }
  double sigma() const { return sigma_; }
  const ThetaRange& common_range() const { return common_; }

  MaterialPair swapped() const { return MaterialPair(phase2_, phase1_, sigma_); }
  MaterialPair with_sigma(double sigma) const { return MaterialPair(phase1_, phase2_, sigma); }

  double psi_jump(double theta) const { return phase2_.psi(theta) - phase1_.psi(theta); }
  double dpsi_jump(double theta) const { return phase2_.dpsi(theta) - phase1_.dpsi(theta); }
  double latent_heat(double theta) const { return theta * dpsi_jump(theta); }

 private:
  PhaseModel phase1_;
  PhaseModel phase2_;
  double sigma_;
  ThetaRange common_;
};

inline JumpState jumps(const MaterialPair& pair, double theta) {
  if (!pair.common_range().contains(theta)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the common range";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  JumpState j;
  j.psi_jump = pair.psi_jump(theta);
  j.dpsi_jump = pair.dpsi_jump(theta);
  j.latent_heat = theta * j.dpsi_jump;
  return j;
}

}  // namespace interphase
