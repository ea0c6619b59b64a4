#include "dstop/kernel.hpp"

#include "dstop/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace dstop {

IntervalKernel::IntervalKernel(std::vector<Piece> pieces, double merge_tol) {
    if (!(merge_tol >= 0.0))
        throw DomainError("kernel: merge tolerance must be nonnegative");
    for (const Piece& p : pieces) {
        if (std::isnan(p.lo) || std::isnan(p.hi) || !std::isfinite(p.lo) || p.lo < 0.0 ||
            p.hi < p.lo)
            throw DomainError("kernel: malformed piece");
    }
    std::erase_if(pieces, [](const Piece& p) { return p.hi <= 0.0; });
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
    for (const Piece& p : pieces) {
        if (!pieces_.empty() && p.lo <= pieces_.back().hi + merge_tol)
            pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
        else
            pieces_.push_back(p);
    }
}

bool IntervalKernel::is_whole() const {
    return pieces_.size() == 1 && pieces_[0].lo == 0.0 && pieces_[0].hi == kInf;
}

bool IntervalKernel::contains(double x) const {
    if (!(x > 0.0))
        return false;
    // First piece with lo > x; the candidate is the one before it.
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.lo; });
    if (it == pieces_.begin())
        return false;
    --it;
    return x <= it->hi;
}

bool IntervalKernel::includes(const IntervalKernel& other) const {
    for (const Piece& q : other.pieces_) {
        if (q.lo == 0.0) {
            if (pieces_.empty() || pieces_.front().lo != 0.0 || pieces_.front().hi < q.hi)
                return false;
            continue;
        }
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), q.lo,
                                   [](double v, const Piece& p) { return v < p.lo; });
        if (it == pieces_.begin() || std::prev(it)->hi < q.hi)
            return false;
    }
    return true;
}

IntervalKernel IntervalKernel::normalized(double merge_tol) const {
    return IntervalKernel(pieces_, merge_tol);
}

Neighbors neighbors(const IntervalKernel& kernel, double x) {
    if (!(x > 0.0))
        throw DomainError("neighbors: x must be positive");
    const auto& ps = kernel.pieces();
    auto it = std::upper_bound(ps.begin(), ps.end(), x,
                               [](double v, const Piece& p) { return v < p.lo; });
    Neighbors n{0.0, kInf, false};
    if (it != ps.end())
        n.b = it->lo;
    if (it != ps.begin()) {
        const Piece& below = *std::prev(it);
        if (x <= below.hi) {
            n.in_closure = true;
            n.a = x;
            n.b = x;
            return n;
        }
        n.a = below.hi;
    }
    return n;
}

IntervalKernel kernel_union(const IntervalKernel& k1, const IntervalKernel& k2,
                            double merge_tol) {
    std::vector<Piece> all = k1.pieces();
    all.insert(all.end(), k2.pieces().begin(), k2.pieces().end());
    return IntervalKernel(std::move(all), merge_tol);
}

bool approx_equal(const IntervalKernel& k1, const IntervalKernel& k2, double tol) {
    if (!(tol > 0.0))
        throw DomainError("approx_equal: tol must be positive");
    if (k1.size() != k2.size())
        return false;
    auto close = [tol](double x, double y) {
        if (std::isinf(x) || std::isinf(y))
            return x == y;
        return std::abs(x - y) < tol;
    };
    for (std::size_t i = 0; i < k1.size(); ++i) {
        if (!close(k1.pieces()[i].lo, k2.pieces()[i].lo) ||
            !close(k1.pieces()[i].hi, k2.pieces()[i].hi))
            return false;
    }
    return true;
}

StoppingLaw StoppingLaw::continue_below(double b) {
    if (!(b >= 0.0) || std::isinf(b))
        throw DomainError("continue_below: threshold must be finite and nonnegative");
    return StoppingLaw(IntervalKernel::ray(b));
}

// ---- text form --------------------------------------------------------------

namespace {

std::string format_number(double v) {
    if (std::isinf(v))
        return "inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_endpoint(const std::string& token, std::string_view whole) {
    const std::string t = trim(token);
    if (t == "inf" || t == "+inf" || t == "∞" || t == "Inf" || t == "infinity")
        return kInf;
    double v = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("kernel: bad endpoint '" + t + "' in '" + std::string(whole) + "'");
    return v;
}

Piece parse_piece(const std::string& raw, std::string_view whole) {
    const std::string s = trim(raw);
    if (s.size() < 3)
        throw ConfigError("kernel: bad piece '" + s + "'");
    const char open = s.front();
    const char close = s.back();
    const std::string body = s.substr(1, s.size() - 2);
    if (open == '{' && close == '}') {
        const double p = parse_endpoint(body, whole);
        return {p, p};
    }
    const auto comma = body.find(',');
    if (comma == std::string::npos || (open != '[' && open != '(') ||
        (close != ']' && close != ')'))
        throw ConfigError("kernel: bad piece '" + s + "' in '" + std::string(whole) + "'");
    const double lo = parse_endpoint(body.substr(0, comma), whole);
    const double hi = parse_endpoint(body.substr(comma + 1), whole);
    // Open brackets are only meaningful at the origin and at infinity.
    if (open == '(' && lo != 0.0)
        throw ConfigError("kernel: open left end only allowed at 0 in '" + s + "'");
    if (close == ')' && hi != kInf)
        throw ConfigError("kernel: open right end only allowed at inf in '" + s + "'");
    if (!(hi >= lo) || lo < 0.0)
        throw ConfigError("kernel: empty or negative piece '" + s + "'");
    return {lo, hi};
}

} // namespace

std::string to_string(const IntervalKernel& kernel) {
    if (kernel.empty())
        return "∅";
    std::ostringstream out;
    bool first = true;
    for (const Piece& p : kernel.pieces()) {
        if (!first)
            out << "∪";
        first = false;
        if (p.lo == p.hi) {
            out << "{" << format_number(p.lo) << "}";
            continue;
        }
        out << (p.lo == 0.0 ? "(" : "[") << format_number(p.lo) << ","
            << format_number(p.hi) << (std::isinf(p.hi) ? ")" : "]");
    }
    return out.str();
}

IntervalKernel parse_kernel(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty() || s == "∅" || s == "{}" || s == "empty" || s == "never")
        return {};
    if (s == "all")
        return IntervalKernel::whole();
    std::vector<Piece> pieces;
    std::size_t pos = 0;
    const std::string_view cup = "∪";
    while (pos <= s.size()) {
        std::size_t next = std::string::npos;
        std::size_t sep_len = 0;
        const auto u8 = s.find(cup, pos);
        const auto ascii = s.find('U', pos);
        if (u8 != std::string::npos && (ascii == std::string::npos || u8 < ascii)) {
            next = u8;
            sep_len = cup.size();
        } else if (ascii != std::string::npos) {
            next = ascii;
            sep_len = 1;
        }
        pieces.push_back(parse_piece(s.substr(pos, next - pos), text));
        if (next == std::string::npos)
            break;
        pos = next + sep_len;
    }
    return IntervalKernel(std::move(pieces));
}

} // namespace dstop
