#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpcf {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

enum class ErrorKind {
  LinkedLeaves,
  PortraitIncompatible,
  LinkedResult,
  DepthInsufficient,
  ModelMismatch,
  DegenerateSegment,
  NotIncident,
  DuplicatePoints,
  OutsideDisk,
  RootFindingFailed,
  NotExpanding,
  DepthExhausted,
  NoWitnessWithinBounds,
  ClusterDegenerate,
  MinimalityViolated,
  HyperbolicityViolated,
  NotSimplicial,
  DimensionMismatch,
  EmptyKeep,
  AnchorUnreachable,
  ItineraryInconsistent,
  DegreeMismatch,
  RadiusSelectionFailed,
  ParseError,
  IoError,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

/// An angle in Q/Z, stored as a reduced fraction in [0, 1).
class Angle {
public:
  Angle() : value_(0) {}

  Angle(BigInt numerator, BigInt denominator) {
    if (denominator == 0) throw Error(ErrorKind::ParseError, "angle with zero denominator");
    value_ = BigRat(std::move(numerator), std::move(denominator));
    reduce_mod1();
  }

  explicit Angle(BigRat value) : value_(std::move(value)) { reduce_mod1(); }

  static Angle parse(const std::string& text) {
    auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return Angle(BigInt(text), 1);
      return Angle(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad angle literal: " + text);
    }
  }

  const BigRat& value() const { return value_; }
  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  std::string str() const {
    return numerator().str() + "/" + denominator().str();
  }

  double to_double() const { return value_.convert_to<double>(); }

  auto operator<=>(const Angle& other) const {
    if (value_ < other.value_) return std::strong_ordering::less;
    if (value_ > other.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const Angle& other) const { return value_ == other.value_; }

  /// m_d: multiplication by d on R/Z.
  Angle times(const BigInt& d) const { return Angle(value_ * BigRat(d)); }

  /// t -> -t on R/Z.
  Angle reflected() const { return Angle(-value_); }

  Angle plus(const Angle& other) const { return Angle(value_ + other.value_); }
  Angle minus(const Angle& other) const { return Angle(value_ - other.value_); }

  /// The d preimages (t + j)/d, j = 0..d-1, in increasing circular order.
  std::vector<Angle> preimages(const BigInt& d) const {
    std::vector<Angle> out;
    for (BigInt j = 0; j < d; ++j) out.push_back(Angle((value_ + BigRat(j)) / BigRat(d)));
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  void reduce_mod1() {
    BigInt n = boost::multiprecision::numerator(value_);
    BigInt q = boost::multiprecision::denominator(value_);
    BigInt r = n % q;
    if (r < 0) r += q;
    value_ = BigRat(r, q);
  }

  BigRat value_;
};

inline Angle map_angle(const Angle& t, const BigInt& d) { return t.times(d); }
inline std::vector<Angle> angle_preimages(const Angle& t, const BigInt& d) { return t.preimages(d); }
inline Angle reflect(const Angle& t) { return t.reflected(); }

/// True iff x lies strictly inside the counterclockwise open arc from a to b.
inline bool in_open_arc(const Angle& x, const Angle& a, const Angle& b) {
  if (a == b) return false;
  if (a < b) return a < x && x < b;
  return x > a || x < b;
}

/// Half-open arc [a, b) going counterclockwise.
inline bool in_half_open_arc(const Angle& x, const Angle& a, const Angle& b) {
  if (a == b) return false;
  if (a < b) return a <= x && x < b;
  return x >= a || x < b;
}

}  // namespace qpcf
