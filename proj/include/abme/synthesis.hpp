#pragma once

#include "abme/core.hpp"
#include "abme/estimator.hpp"
#include "abme/motion.hpp"
#include "abme/warp.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace abme {

enum class Method { Approx1, Approx2, SBMF, ABMF, Full };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Approx1: return "approx1";
    case Method::Approx2: return "approx2";
    case Method::SBMF: return "sbmf";
    case Method::ABMF: return "abmf";
    case Method::Full: return "full";
  }
  return "unknown";
}

inline Method parse_method(std::string name) {
  for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (Method m : {Method::Approx1, Method::Approx2, Method::SBMF, Method::ABMF, Method::Full})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

struct FilterParams {
  double gamma = 20.0;  ///< sharpness of the discrepancy-to-weight mapping
  double sigma = 1.0;   ///< spatial spread of the 3x3 taps
};

/// The four warped candidates: sym t->0, sym t->1, asym t->0, asym t->1.
template <typename Scalar>
struct CandidateSet {
  std::array<Frame<Scalar>, 4> frames;
  Mask<Scalar> error_symmetric;   ///< mean_c |cand0 - cand1|, unclamped
  Mask<Scalar> error_asymmetric;  ///< mean_c |cand2 - cand3|, unclamped
};

/// Per-pixel 3x3x4 fusion coefficients. Row = y * width + x, column =
/// c * 9 + (j + 1) * 3 + (i + 1) for tap offset (i, j) in x and y.
template <typename Scalar>
class FilterBank {
 public:
  static constexpr int kTaps = 36;
  using Coefficients = Eigen::Array<Scalar, Eigen::Dynamic, kTaps, Eigen::RowMajor>;

  FilterBank() = default;
  FilterBank(int width, int height) : width_(width), height_(height), coeffs_(Coefficients::Zero(width * height, kTaps)) {}

  int width() const { return width_; }
  int height() const { return height_; }

  static constexpr int column(int i, int j, int c) { return c * 9 + (j + 1) * 3 + (i + 1); }

  Scalar& operator()(int x, int y, int i, int j, int c) { return coeffs_(y * width_ + x, column(i, j, c)); }
  Scalar operator()(int x, int y, int i, int j, int c) const { return coeffs_(y * width_ + x, column(i, j, c)); }

  Coefficients& coefficients() { return coeffs_; }
  const Coefficients& coefficients() const { return coeffs_; }

  /// Largest |sum - 1| over pixels.
  Scalar normalization_error() const { return (coeffs_.rowwise().sum() - Scalar(1)).abs().maxCoeff(); }

 private:
  int width_ = 0;
  int height_ = 0;
  Coefficients coeffs_;
};

template <typename Scalar>
CandidateSet<Scalar> build_candidates(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1,
                                      const BilateralResult<Scalar>& result) {
  detail::require(frame0.same_shape(frame1), "build_candidates: frames differ in shape");
  for (const auto* f : {&result.vs_t0, &result.vs_t1, &result.va_t0, &result.va_t1})
    detail::require(f->same_size(frame0), "build_candidates: fields are not at input resolution");
  CandidateSet<Scalar> set;
  set.frames[0] = backward_warp(result.vs_t0, frame0);
  set.frames[1] = backward_warp(result.vs_t1, frame1);
  set.frames[2] = backward_warp(result.va_t0, frame0);
  set.frames[3] = backward_warp(result.va_t1, frame1);
  set.error_symmetric = Mask<Scalar>(detail::mean_abs_difference(set.frames[0], set.frames[1]));
  set.error_asymmetric = Mask<Scalar>(detail::mean_abs_difference(set.frames[2], set.frames[3]));
  return set;
}

/// Classical fusion coefficients. Candidate weight exp(-gamma * E_pair) times
/// its direction mask (masks.first for t->0 candidates, masks.second for
/// t->1); tap weight exp(-(i^2+j^2) / (2 sigma^2)). Off-center taps are
/// further scaled by 1 - exp(-gamma * min(E_S, E_A)), so pixels where some
/// pair agrees are fused without spatial smoothing.
template <typename Scalar>
FilterBank<Scalar> make_filters(const CandidateSet<Scalar>& cands, const std::pair<Mask<Scalar>, Mask<Scalar>>& masks,
                                Scalar gamma, Scalar sigma) {
  detail::require(gamma > Scalar(0) && sigma > Scalar(0), "make_filters: gamma and sigma must be positive");
  const int w = cands.frames[0].width();
  const int h = cands.frames[0].height();
  detail::require(masks.first.width() == w && masks.first.height() == h && masks.second.width() == w &&
                      masks.second.height() == h,
                  "make_filters: masks differ in size from the candidates");

  Scalar tap[3][3];
  for (int j = -1; j <= 1; ++j)
    for (int i = -1; i <= 1; ++i) tap[j + 1][i + 1] = std::exp(-Scalar(i * i + j * j) / (Scalar(2) * sigma * sigma));

  FilterBank<Scalar> bank(w, h);
  for_each_row(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const Scalar es = cands.error_symmetric(x, y);
      const Scalar ea = cands.error_asymmetric(x, y);
      const Scalar sym = std::exp(-gamma * es);
      const Scalar asym = std::exp(-gamma * ea);
      const Scalar m0 = masks.first(x, y);
      const Scalar m1 = masks.second(x, y);
      const Scalar weight[4] = {sym * m0, sym * m1, asym * m0, asym * m1};
      const Scalar spread = Scalar(1) - std::exp(-gamma * std::min(es, ea));

      Scalar total = 0;
      for (int c = 0; c < 4; ++c)
        for (int j = -1; j <= 1; ++j)
          for (int i = -1; i <= 1; ++i) {
            const Scalar g = (i == 0 && j == 0) ? tap[1][1] : tap[j + 1][i + 1] * spread;
            const Scalar v = weight[c] * g;
            bank(x, y, i, j, c) = v;
            total += v;
          }
      auto row = bank.coefficients().row(y * w + x);
      if (total < Scalar(1e-12))
        row.setConstant(Scalar(1) / Scalar(FilterBank<Scalar>::kTaps));
      else
        row /= total;
    }
  });
  return bank;
}

/// out(x,y) = sum_c sum_ij H(x,y,i,j,c) * cand_c(x+i, y+j), clamped borders,
/// result clamped to [0,1].
template <typename Scalar>
Frame<Scalar> apply_dlc(const CandidateSet<Scalar>& cands, const FilterBank<Scalar>& filters) {
  const auto& first = cands.frames[0];
  for (const auto& f : cands.frames)
    detail::require(f.same_shape(first), "apply_dlc: candidates differ in shape");
  detail::require(filters.width() == first.width() && filters.height() == first.height(),
                  "apply_dlc: filters differ in size from the candidates");
  detail::require(filters.normalization_error() <= Scalar(1e-4), "apply_dlc: filters are not normalized");
  const int w = first.width();
  const int h = first.height();
  Frame<Scalar> out(w, h, first.channels());
  for_each_row(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < first.channels(); ++ch) {
        Scalar sum = 0;
        for (int c = 0; c < 4; ++c) {
          const auto& plane = cands.frames[static_cast<std::size_t>(c)].channel(ch);
          for (int j = -1; j <= 1; ++j) {
            const int yy = std::clamp(y + j, 0, h - 1);
            for (int i = -1; i <= 1; ++i) sum += filters(x, y, i, j, c) * plane(yy, std::clamp(x + i, 0, w - 1));
          }
        }
        out.channel(ch)(y, x) = sum;
      }
    }
  });
  return out.clamp(Scalar(0), Scalar(1));
}

/// filtered + residual, clamped to [0,1]. No residual means zero residual.
template <typename Scalar>
Frame<Scalar> compose_residual(const Frame<Scalar>& filtered, const std::optional<Frame<Scalar>>& residual = std::nullopt) {
  Frame<Scalar> out = filtered;
  if (residual) {
    detail::require(residual->same_shape(filtered), "compose_residual: residual differs in shape");
    for (int c = 0; c < out.channels(); ++c) out.channel(c) += residual->channel(c);
  }
  return out.clamp(Scalar(0), Scalar(1));
}

/// The intermediate bilateral pair each backward-warping method uses.
template <typename Scalar>
BilateralPair<Scalar> method_fields(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1, Scalar t,
                                    const SearchParams& params, Method method) {
  switch (method) {
    case Method::Approx1: {
      const MotionField<Scalar> flow01 = estimate_flow(frame0, frame1, params);
      return approx_borrowed(flow01, flow01, t, BorrowFrom::Flow01);
    }
    case Method::Approx2:
      return approx_blended(estimate_flow(frame0, frame1, params), estimate_flow(frame1, frame0, params), t);
    case Method::SBMF: {
      auto [q_t0, q_t1] = estimate_symmetric(frame0, frame1, t, params);
      auto vt1 = upsample_field(q_t1, frame0.width(), frame0.height());
      auto vt0 = symmetric_counterpart(vt1, t);
      return {std::move(vt0), std::move(vt1)};
    }
    case Method::ABMF:
    case Method::Full: {
      auto r = estimate_abme(frame0, frame1, t, params);
      return {std::move(r.va_t0), std::move(r.va_t1)};
    }
  }
  throw std::invalid_argument("method_fields: unknown method");
}

/// Synthesizes the frame at time t with the chosen motion model.
template <typename Scalar>
Frame<Scalar> interpolate(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1, Scalar t,
                          const SearchParams& params, Method method, const FilterParams& filter = {}) {
  detail::require_time(t, "interpolate");
  detail::require(frame0.same_shape(frame1), "interpolate: frames differ in shape");
  if (method != Method::Full) {
    const auto [vt0, vt1] = method_fields(frame0, frame1, t, params, method);
    return interp_backward(frame0, frame1, vt0, vt1, t).clamp(Scalar(0), Scalar(1));
  }
  const auto result = estimate_abme(frame0, frame1, t, params);
  const auto cands = build_candidates(frame0, frame1, result);
  const auto filters = make_filters(cands, result.masks, Scalar(filter.gamma), Scalar(filter.sigma));
  return compose_residual(apply_dlc(cands, filters));
}

}  // namespace abme
