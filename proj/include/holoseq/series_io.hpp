#pragma once

#include <iosfwd>
#include <string>

#include "holoseq/series.hpp"

namespace holoseq {

/**
 * @brief Text form of a CoeffSeries.
 *
 * Header `dim d order N`, then one line per alpha in graded-lex order:
 * exponents, real part, imaginary part. Doubles are written in shortest
 * round-trip form, so write followed by read is bit-exact.
 */
void write_series(std::ostream& os, const CoeffSeries& u);
CoeffSeries read_series(std::istream& is);

std::string format_double(double x);

}  // namespace holoseq
