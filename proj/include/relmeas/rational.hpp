#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "relmeas/error.hpp"

namespace relmeas {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Always emits the explicit "p/q" form, so serialized tables are uniform.
inline std::string rat_str(const Rat& r) {
  return BigInt(numerator(r)).str() + "/" + BigInt(denominator(r)).str();
}

// Accepts "p" and "p/q"; normalizes eagerly.
inline Rat rat_parse(const std::string& s) {
  try {
    return Rat(s);
  } catch (const std::exception&) {
    throw Error("BadRational", s);
  }
}

}  // namespace relmeas
