#include "holoseq/series_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "holoseq/errors.hpp"

namespace holoseq {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ValidationError("series text: bad number '" + tok + "'");
    }
    return v;
}

}  // namespace

void write_series(std::ostream& os, const CoeffSeries& u) {
    const IndexSpace& sp = u.space();
    os << "dim " << u.dim() << " order " << u.order() << '\n';
    for (std::size_t a = 0; a < sp.size(); ++a) {
        for (unsigned e : sp.exponents(a)) os << e << ' ';
        os << format_double(u[a].real()) << ' ' << format_double(u[a].imag()) << '\n';
    }
}

CoeffSeries read_series(std::istream& is) {
    std::string w1, w2;
    long d = 0, n = 0;
    if (!(is >> w1 >> d >> w2 >> n) || w1 != "dim" || w2 != "order" || d < 1 || n < 0) {
        throw ValidationError("series text: expected header 'dim d order N'");
    }
    CoeffSeries u(static_cast<std::size_t>(d), static_cast<int>(n));
    const IndexSpace& sp = u.space();
    std::vector<unsigned> alpha(static_cast<std::size_t>(d));
    for (std::size_t line = 0; line < sp.size(); ++line) {
        for (auto& e : alpha) {
            if (!(is >> e)) throw ValidationError("series text: truncated exponent list");
        }
        std::string re, im;
        if (!(is >> re >> im)) throw ValidationError("series text: truncated coefficient");
        u[sp.index_of(alpha)] = cplx(parse_double(re), parse_double(im));
    }
    return u;
}

}  // namespace holoseq
