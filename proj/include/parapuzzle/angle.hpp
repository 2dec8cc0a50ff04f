#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace parapuzzle {

/// Exact rational angle num/den in turns, always reduced with 0 <= num < den.
class Angle {
 public:
  Angle() = default;
  Angle(std::uint64_t num, std::uint64_t den);

  static Angle parse(const std::string& text);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double turns() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Angle doubled() const;
  Angle doubled(unsigned times) const;
  /// The two preimages under doubling: t/2 and (t+1)/2.
  Angle half(bool upper) const;
  /// Preimage (t + j) / 2^k.
  Angle preimage(unsigned k, std::uint64_t j) const;
  Angle plus_half() const;

  /// Exact 2^k t mod 1 as a double, with no drift for large k.
  double doubled_turns(unsigned k) const;

  std::string to_string() const;

  friend bool operator==(const Angle&, const Angle&) = default;
  friend std::strong_ordering operator<=>(const Angle& a, const Angle& b);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// Whether t lies on the counterclockwise open arc from a to b.
bool on_open_arc(const Angle& from, const Angle& to, const Angle& t);
/// Counterclockwise length of the arc from a to b in turns.
double arc_length(const Angle& from, const Angle& to);

/// Closed counterclockwise arc of the circle.
struct AngleArc {
  Angle from;
  Angle to;
  bool contains(const Angle& t) const;
  bool contains_arc(const AngleArc& other) const;
  double length() const { return arc_length(from, to); }
};

/// Preimages of an arc under doubling^k that have length length/2^k.
std::vector<AngleArc> arc_preimages(const AngleArc& arc, unsigned k);

}  // namespace parapuzzle
