#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spalloc {

/// One segment of a PiecewiseFunction.
///
/// closed_form pieces evaluate  a + b*t + c/(t - s) + e*ln(d*(t - s)),
/// which covers constants, affine maps and the reciprocal-log family.
struct Piece {
  enum class Kind { closed_form, table, custom, infinite };

  Kind kind = Kind::closed_form;
  double a = 0.0, b = 0.0, c = 0.0, e = 0.0, d = 1.0, s = 0.0;
  std::vector<double> xs, ys;                    // table: linear interpolation
  std::function<double(double)> fn;              // custom
  std::function<double(double)> antiderivative;  // custom, optional

  static Piece constant(double value);
  static Piece affine(double intercept, double slope);
  static Piece log_family(double a, double b, double c, double e, double d, double s);
  static Piece table(std::vector<double> xs, std::vector<double> ys);
  static Piece custom(std::function<double(double)> fn, std::function<double(double)> antiderivative = {});
  static Piece infinite();

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
  /// Integral over [x0, x1] inside the piece.
  [[nodiscard]] double integral(double x0, double x1) const;
};

/// Scalar function on [breakpoints.front(), breakpoints.back()] made of pieces.
/// Piece k covers [breakpoints[k], breakpoints[k+1]); the last piece is closed.
class PiecewiseFunction {
 public:
  PiecewiseFunction() = default;
  PiecewiseFunction(std::vector<double> breakpoints, std::vector<Piece> pieces);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double derivative(double t) const;
  /// Integral over [x0, x1]; +inf once an infinite piece is entered with positive length.
  [[nodiscard]] double integral(double x0, double x1) const;

  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }
  [[nodiscard]] double lower() const { return breakpoints_.front(); }
  [[nodiscard]] double upper() const { return breakpoints_.back(); }
  [[nodiscard]] int piece_index(double t) const;

  /// Smallest sampled increment over `samples` equally spaced points (negative means decreasing somewhere).
  [[nodiscard]] double min_sampled_increment(int samples = 10000) const;
  /// Largest jump across an interior breakpoint between finite pieces.
  [[nodiscard]] double max_interior_jump() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
};

}  // namespace spalloc
