#include "parapuzzle/angle.hpp"

#include <numeric>

#include "parapuzzle/common.hpp"

namespace parapuzzle {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kMaxDen = std::uint64_t{1} << 62;

std::uint64_t pow2_mod(unsigned k, std::uint64_t m) {
  u128 result = 1 % m;
  u128 base = 2 % m;
  while (k > 0) {
    if (k & 1u) result = result * base % m;
    base = base * base % m;
    k >>= 1u;
  }
  return static_cast<std::uint64_t>(result);
}

}  // namespace

Angle::Angle(std::uint64_t num, std::uint64_t den) {
  if (den == 0) fail(ErrorCode::InvalidArgument, "angle denominator must be positive");
  num %= den;
  const std::uint64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Angle Angle::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(text);
      if (v == 0.0) return Angle(0, 1);
      fail(ErrorCode::InvalidArgument, "angle must be given as num/den: " + text);
    }
    const auto num = std::stoull(text.substr(0, slash));
    const auto den = std::stoull(text.substr(slash + 1));
    return Angle(num, den);
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "cannot parse angle: " + text);
  }
}

Angle Angle::doubled() const { return doubled(1); }

Angle Angle::doubled(unsigned times) const {
  const u128 n = static_cast<u128>(num_) * pow2_mod(times, den_) % den_;
  return Angle(static_cast<std::uint64_t>(n), den_);
}

double Angle::doubled_turns(unsigned k) const {
  const u128 n = static_cast<u128>(num_) * pow2_mod(k, den_) % den_;
  return static_cast<double>(static_cast<std::uint64_t>(n)) / static_cast<double>(den_);
}

Angle Angle::half(bool upper) const { return preimage(1, upper ? 1 : 0); }

Angle Angle::preimage(unsigned k, std::uint64_t j) const {
  if (k >= 62 || den_ > (kMaxDen >> k))
    fail(ErrorCode::InvalidArgument, "angle denominator overflow in preimage");
  const std::uint64_t scale = std::uint64_t{1} << k;
  const u128 num = static_cast<u128>(num_) + static_cast<u128>(j % scale) * den_;
  return Angle(static_cast<std::uint64_t>(num), den_ * scale);
}

Angle Angle::plus_half() const {
  if (den_ % 2 == 0) return Angle(num_ + den_ / 2, den_);
  if (den_ > kMaxDen / 2) fail(ErrorCode::InvalidArgument, "angle denominator overflow");
  return Angle(2 * num_ + den_, 2 * den_);
}

std::string Angle::to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
  const u128 lhs = static_cast<u128>(a.num_) * b.den_;
  const u128 rhs = static_cast<u128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool on_open_arc(const Angle& from, const Angle& to, const Angle& t) {
  if (from == to) return t != from;
  if (from < to) return from < t && t < to;
  return t > from || t < to;
}

double arc_length(const Angle& from, const Angle& to) {
  double d = to.turns() - from.turns();
  if (d <= 0.0) d += 1.0;
  return d;
}

bool AngleArc::contains(const Angle& t) const { return t == from || t == to || on_open_arc(from, to, t); }

bool AngleArc::contains_arc(const AngleArc& other) const {
  if (!contains(other.from) || !contains(other.to)) return false;
  if (on_open_arc(other.from, other.to, to)) return false;
  if (on_open_arc(other.from, other.to, from)) return false;
  return true;
}

std::vector<AngleArc> arc_preimages(const AngleArc& arc, unsigned k) {
  const std::uint64_t count = std::uint64_t{1} << k;
  const std::uint64_t wrap = arc.to <= arc.from ? 1 : 0;
  std::vector<AngleArc> out;
  out.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j)
    out.push_back({arc.from.preimage(k, j), arc.to.preimage(k, j + wrap)});
  return out;
}

}  // namespace parapuzzle
