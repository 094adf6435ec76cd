#pragma once

#include <complex>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace oscimax {

/// A pair of points w = (x, t, θ), w′ = (x′, t′, θ′) of 𝕀 × 𝕀 × Ω at frequency scale λ.
struct KernelSample {
  double x = 0.0;
  double t = 0.0;
  double theta = 0.0;
  double xp = 0.0;
  double tp = 0.0;
  double thetap = 0.0;
  double lambda = 1.0;
  double m = 2.0;
};

void validate_sample(const KernelSample& sample);

/// Same pair with w and w′ exchanged.
KernelSample swapped(const KernelSample& sample) noexcept;

/// ϱ(w) − ϱ(w′) for the line field ϱ(x,t,θ) = x + tθ.
double rho_difference(const KernelSample& sample) noexcept;

/// ψ(ξ) = exp(1 − 1/(1 − u²)), u = (|ξ| − 5/4)/(3/4), supported on 1/2 < |ξ| < 2.
double psi(double xi) noexcept;

/// ∫ψ², computed once.
double psi_squared_integral();

/// K_λ(w,w′) = λ∫ e^{iφ(λξ,w,w′)} ψ(ξ)² dξ with φ(ξ) = (ϱ(w) − ϱ(w′))ξ + (t − t′)|ξ|^m.
std::complex<double> kernel_eval(const KernelSample& sample, double rel_tol = 1e-8);

/// s_* = min(1/4, α/q).
double s_star(double alpha, double q) noexcept;

enum class KernelRegion { V1, V2, V3 };
std::string_view region_name(KernelRegion region) noexcept;

/// V1: |x−x′| ≤ 2λ^{-qs_*/α}; V2: separated and |x−x′| ≤ 4|t−t′|; V3: separated and |x−x′| > 4|t−t′|.
/// Throws InvalidExponents unless q ≥ 2 and 0 < α ≤ 1.
KernelRegion classify_region(const KernelSample& sample, double q, double alpha);

/// Low-frequency part of the split: |x−x′| > 8mλ^{m−1}|t−t′||ξ|^{m−1}.
bool in_u1(const KernelSample& sample, double xi) noexcept;

/// Seeded samples at scale λ with θ, θ′ in Ω = [0, λ^{-qs_*/α}]. Indices cycle through
/// four kinds: uniform pairs, near-diagonal pairs, pairs with |x−x′| ≤ 4|t−t′|, and
/// separated pairs whose phase is stationary inside the support of ψ. Time gaps are
/// drawn with λ^m|t−t′| ≤ 2^11 where the kind allows it.
std::vector<KernelSample> kernel_samples(int count, std::uint64_t seed, double lambda, double m, double q,
                                         double alpha);

struct KernelRow {
  double lambda = 0.0;
  int samples = 0;
  int v1 = 0;
  int v2 = 0;
  int v3 = 0;
  /// Samples with |K| > λ∫ψ² + 1e-9.
  int violations = 0;
  /// max |K(w,w′) − conj K(w′,w)| / (λ∫ψ²).
  double hermitian_error = 0.0;
  /// max over V2 ∪ V3 of |K| / (λ^{1/2}|x−x′|^{-1/2}).
  double constant = 0.0;
};

struct KernelReport {
  std::vector<KernelRow> rows;
  double max_constant = 0.0;
  /// (max − min)/max of the per-λ constants.
  double constant_spread = 0.0;
  int violations = 0;
  double hermitian_error = 0.0;
};

/// Same seed at every λ, so the sample geometry is matched across the ladder.
KernelReport kernel_sweep(double alpha, double q, double m, const std::vector<double>& lambdas, int samples,
                          std::uint64_t seed, int threads = 1);

enum class VdcPhase { Quadratic, MonotoneLinear, Fractional };
std::string_view vdc_phase_name(VdcPhase phase) noexcept;
VdcPhase parse_vdc_phase(std::string_view name);

/// Derivative order k of the family: 2, 1, 2.
int vdc_order(VdcPhase phase) noexcept;

/// I(λ) = ∫_a^b e^{iλφ} a(ξ) dξ.
///   quadratic   φ = ξ²/2 on [−1,1], a = cos(πξ/2)
///   monotone    φ = ξ on [0,1], a = cos(πξ/2)
///   fractional  φ = (|ξ|^m − m(5/4)^{m−1}ξ)/c on [1/2,2], a = ψ, c = min φ″ before scaling
/// The amplitudes vanish at the far endpoints so the leading term is clean.
std::complex<double> vdc_integral(VdcPhase phase, double lambda, double m = 2.0);

struct VdcRow {
  double lambda = 0.0;
  double modulus = 0.0;
  /// λ^{1/k}|I(λ)|.
  double scaled = 0.0;
};

struct VdcReport {
  VdcPhase phase = VdcPhase::Quadratic;
  int k = 2;
  std::vector<VdcRow> rows;
  double slope = 0.0;
  double stderr_slope = 0.0;
  /// sup over the ladder of λ^{1/k}|I(λ)|.
  double constant = 0.0;
  /// (max − min)/max of λ^{1/k}|I| over rungs with λ ≥ λ_max/10.
  double top_decade_spread = 0.0;
};

/// Throws DegenerateLadder for fewer than five rungs or less than a decade of λ.
VdcReport vdc_decay_fit(VdcPhase phase, const std::vector<double>& ladder, double m = 2.0);

/// λ_min·2^j for j = 0, 1, … up to λ_max.
std::vector<double> dyadic_ladder(double lambda_min, double lambda_max);

struct YoungMode {
  double a = -1.0;
  double b = 1.0;
};
struct HlsMode {
  double rho = 0.4;
};
using InequalityMode = std::variant<YoungMode, HlsMode>;

/// Nonnegative step function on 𝕀 × 𝕀 = [−1,1]², value of cell (i,j) at values[i·resolution + j]
/// with i indexing x.
struct StepFunction {
  int resolution = 0;
  std::vector<double> values;
};

StepFunction constant_step_function(int resolution, double value);

/// A window in x of random centre and log-uniform width in [2^{-6}, 2], times
/// uniform values on a fixed 64 × 64 block grid. Refining the resolution samples
/// the same underlying function.
StepFunction random_step_function(int resolution, std::uint64_t seed, std::uint64_t stream);

/// LHS / ((b−a)^{2α/q}‖g‖‖h‖) (Young) or LHS / (‖g‖‖h‖) (HLS) with μ = |x|^{α−1}dx and
/// ‖g‖ = ‖g‖_{L^{q′}_x(dμ)L¹_t}. Cell masses of μ are exact; the kernel is averaged over
/// each pair of x cells in closed form.
double inequality_ratio(double alpha, double q, const InequalityMode& mode, const StepFunction& g,
                        const StepFunction& h);

struct InequalityRow {
  int resolution = 0;
  double max_ratio = 0.0;
};

struct InequalityReport {
  double max_ratio = 0.0;
  std::vector<InequalityRow> rows;
};

/// Throws InvalidExponents unless q ≥ 2, 0 < α ≤ 1, a < b (Young) or 0 < qρ/2 < α (HLS).
void validate_inequality(double alpha, double q, const InequalityMode& mode);

/// Trial i uses streams 2i and 2i+1 for g and h at every resolution.
InequalityReport young_hls_check(double alpha, double q, const InequalityMode& mode, int trials,
                                 const std::vector<int>& resolutions, std::uint64_t seed, int threads = 1);

}  // namespace oscimax
