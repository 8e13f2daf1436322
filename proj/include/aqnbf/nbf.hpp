#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aqnbf/aqset.hpp"
#include "aqnbf/behavior.hpp"

namespace aqnbf {

/// Gram matrix Z over the monomial basis certifying that `target`, a
/// polynomial in basis coordinates, is a sum of Hermitian squares modulo the
/// projector identities. For a lower bound target = f - bound, for an upper
/// bound target = bound - f.
struct SosCertificate {
  Sense sense = Sense::Min;
  Eigen::MatrixXd gram;
  double bound = 0.0;
  std::vector<double> target;
};

SosCertificate make_certificate(const BellFunctional& f, const DualCertificate& cert);

/// Factors f_i with Z = sum_i |f_i><f_i|, and the polynomial sum_i f_i^† f_i
/// read back through the word classes.
struct SosDecomposition {
  std::vector<Eigen::VectorXd> factors;
  /// Recomposed coefficient per basis monomial.
  std::vector<double> reconstructed;
  /// Worst coefficient mismatch, including words outside the basis (which
  /// must vanish).
  double residual = 0.0;
};

/// Throws NumericalError when Z has an eigenvalue below -1e-6; eigenvalues
/// in between are clipped to zero.
SosDecomposition sos_decomposition(const SosCertificate& cert, const MomentStructure& structure);

enum class Verdict { Nbf, NotNbf, Indeterminate };
std::string to_string(Verdict v);

struct NbfVerdict {
  Verdict verdict = Verdict::Indeterminate;
  double aq_min = 0.0;
  double aq_max = 0.0;
  /// Duality gaps of the two solves.
  double min_gap = 0.0;
  double max_gap = 0.0;
  std::optional<SosCertificate> lower;
  std::optional<SosCertificate> upper;
  double tol = 0.0;
  std::string message;

  bool is_nbf() const noexcept { return verdict == Verdict::Nbf; }
};

/// Normalized on the almost-quantum set: aq_min >= -tol and aq_max <= 1 + tol.
NbfVerdict verify_nbf(const BellFunctional& f, double tol, const sdp::SolverConfig& cfg = {});

/// Setting-indexed Bell measurement: members[xi][alpha] is U_{alpha|xi}.
class NbfFamily {
 public:
  explicit NbfFamily(std::vector<std::vector<BellFunctional>> members);
  /// Family {U, 1 - U} per setting from the outcome-0 members.
  static NbfFamily two_outcome(const std::vector<BellFunctional>& outcome_zero);

  const Scenario& scenario() const { return members_.front().front().scenario(); }
  int settings() const noexcept { return static_cast<int>(members_.size()); }
  int outcomes() const noexcept { return static_cast<int>(members_.front().size()); }
  const BellFunctional& at(int xi, int alpha) const {
    return members_.at(static_cast<std::size_t>(xi)).at(static_cast<std::size_t>(alpha));
  }
  const std::vector<std::vector<BellFunctional>>& members() const noexcept { return members_; }

 private:
  std::vector<std::vector<BellFunctional>> members_;
};

struct Completeness {
  bool complete = false;
  /// Largest deviation of sum_alpha U_{alpha|xi} from the unit functional.
  double coefficient_residual = 0.0;
  /// Largest |sum_alpha U_{alpha|xi}(p) - 1| over random no-signalling p.
  double sample_residual = 0.0;
};

Completeness check_complete(const NbfFamily& fam, double tol = 1e-9, unsigned seed = 1);

/// Which of V's two parties receives the family's output. The other party of
/// V becomes the third party of the composed functional.
struct CompositionMap {
  int family_slot = 0;
  /// Setting count of the third party; -1 pads it to the largest setting
  /// count of the family scenario and V's remaining party.
  int third_party_settings = -1;
};

/// W(a,b,c,x,y,z) = sum_{alpha,xi} V(alpha,c,xi,z) U_{alpha|xi}(a,b,x,y) with
/// (alpha, xi) in `map.family_slot`, computed on full coefficient tables and
/// converted back to the monomial basis. Requires a complete family.
BellFunctional compose(const BellFunctional& v, const NbfFamily& fam, const CompositionMap& map = {});

/// The same composition by substituting U_{alpha|xi} for V's letters in the
/// monomial basis. No completeness requirement.
BellFunctional compose_polynomial(const BellFunctional& v, const NbfFamily& fam,
                                  const CompositionMap& map = {});

/// Scenario of the composed functional.
Scenario composed_scenario(const BellFunctional& v, const NbfFamily& fam, const CompositionMap& map);

struct PaperFunctionals {
  BellFunctional u00;
  BellFunctional u01;
  BellFunctional v;
  NbfFamily family() const { return NbfFamily::two_outcome({u00, u01}); }
  /// The family feeds V's second party.
  static CompositionMap composition_map() { return CompositionMap{1, -1}; }
  BellFunctional composed() const { return compose(v, family(), composition_map()); }
};

/// Functionals exactly as printed (four decimals).
PaperFunctionals paper_functionals();

/// U00 as an operational wiring: both parties measure setting 1, output 0
/// iff the outcomes agree.
double wiring_u00(const Behavior& b);

/// Coupling of a functional's coefficients to a Gram matrix Z >= 0 that
/// certifies nonnegativity on the almost-quantum set: for every word class
/// the sum of Z over the class equals the word's coefficient.
struct NonnegativityCone {
  enum class Target { Unit, Basis, Vanishing };
  struct ClassRow {
    Target target;
    /// Basis index whose coefficient the class sum must equal (0 for the unit).
    int basis_index;
    std::vector<std::pair<int, int>> upper_cells;
  };
  const MomentStructure* structure = nullptr;
  std::vector<ClassRow> rows;

  int dim() const { return structure->size(); }
  /// sdp entries of the class indicator of row r on `block`, scaled.
  std::vector<sdp::Entry> entries(std::size_t row, int block, double scale = 1.0) const;
};

/// Zero-class cells impose nothing and are omitted.
NonnegativityCone nbf_constraints(const Scenario& scenario);

/// Membership of f in the cone, decided by the largest margin t such that
/// f - t still has a Gram matrix (the unit row is left free). Fixing t = 0
/// directly is ill-posed for functionals touching zero, whose Gram matrices
/// are all singular.
struct ConeMembership {
  bool member = false;
  double margin = 0.0;
  Eigen::MatrixXd gram;
  sdp::Status status = sdp::Status::NumericalTrouble;
};
ConeMembership aq_nonnegative(const BellFunctional& f, double tol = 1e-7, const sdp::SolverConfig& cfg = {});

/// Class-sum coefficients certified by Z, per basis monomial.
std::vector<double> certified_coefficients(const NonnegativityCone& cone, const Eigen::MatrixXd& gram);

}  // namespace aqnbf
