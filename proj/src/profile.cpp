#include "heatlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "heatlab/errors.hpp"

namespace heatlab {

Jet exp_of_log(const Jet& l) {
    double s = std::exp(l.f);
    if (s == 0.0) return {0.0, 0.0, 0.0};
    return {s, s * l.d1, s * (l.d2 + l.d1 * l.d1)};
}

Jet log_of(const Jet& s) {
    double g = s.d1 / s.f;
    return {std::log(s.f), g, s.d2 / s.f - g * g};
}

const char* to_string(Family f) {
    switch (f) {
        case Family::exp_alpha: return "exp_alpha";
        case Family::euclidean: return "euclidean";
        case Family::power: return "power";
        case Family::hyperbolic: return "hyperbolic";
        case Family::rlogr: return "rlogr";
        case Family::table: return "table";
        case Family::two_end: return "two_end";
    }
    return "?";
}

namespace {

// Quintic Hermite interpolant on [x0, x1] matching value, slope and
// curvature at both ends.
Jet quintic(double x0, double x1, const Jet& a, const Jet& b, double x) {
    double h = x1 - x0, s = (x - x0) / h;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    double H[6] = {1 - 10 * s3 + 15 * s4 - 6 * s5, s - 6 * s3 + 8 * s4 - 3 * s5,
                   0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5, 10 * s3 - 15 * s4 + 6 * s5,
                   -4 * s3 + 7 * s4 - 3 * s5, 0.5 * s3 - s4 + 0.5 * s5};
    double D[6] = {-30 * s2 + 60 * s3 - 30 * s4, 1 - 18 * s2 + 32 * s3 - 15 * s4,
                   s - 4.5 * s2 + 6 * s3 - 2.5 * s4, 30 * s2 - 60 * s3 + 30 * s4,
                   -12 * s2 + 28 * s3 - 15 * s4, 1.5 * s2 - 4 * s3 + 2.5 * s4};
    double E[6] = {-60 * s + 180 * s2 - 120 * s3, -36 * s + 96 * s2 - 60 * s3,
                   1 - 9 * s + 18 * s2 - 10 * s3, 60 * s - 180 * s2 + 120 * s3,
                   -24 * s + 84 * s2 - 60 * s3, 3 * s - 12 * s2 + 10 * s3};
    double c[6] = {a.f, h * a.d1, h * h * a.d2, b.f, h * b.d1, h * h * b.d2};
    Jet out;
    for (int k = 0; k < 6; ++k) {
        out.f += c[k] * H[k];
        out.d1 += c[k] * D[k];
        out.d2 += c[k] * E[k];
    }
    out.d1 /= h;
    out.d2 /= h * h;
    return out;
}

// Cubic l0 + a r^2 + b r^3 on [0, c] matching the jet at c.
struct CapCubic {
    double l0 = 0, a = 0, b = 0;
    CapCubic() = default;
    CapCubic(double c, const Jet& at) {
        b = (at.d2 * c - at.d1) / (3.0 * c * c);
        a = 0.5 * (at.d2 - 6.0 * b * c);
        l0 = at.f - a * c * c - b * c * c * c;
    }
    Jet operator()(double r) const {
        return {l0 + a * r * r + b * r * r * r, 2 * a * r + 3 * b * r * r, 2 * a + 6 * b * r};
    }
};

double log_sinh(double r) {
    if (r > 20.0) return r - std::log(2.0) + std::log1p(-std::exp(-2.0 * r));
    return std::log(std::sinh(r));
}

}  // namespace

struct RadialProfile::Impl {
    Family family;
    Domain domain = Domain::half_line;
    int n = 2;
    double alpha = 1.0;
    double beta = 1.0;
    double cap = 0.0;
    CapCubic cubic;
    std::vector<double> tr, tlog;  // table nodes and log psi
    std::shared_ptr<const Impl> plus, minus;
    double join = 1.0;
    Jet blend_lo, blend_hi;  // log S jets at -join and +join

    double r_min() const {
        if (domain == Domain::full_line) return -INFINITY;
        return family == Family::table ? tr.front() : 0.0;
    }
    double r_max() const { return family == Family::table ? tr.back() : INFINITY; }

    void check(double r) const {
        if (!(r >= r_min() && r <= r_max()) )
            throw RangeError(std::string(to_string(family)) + " profile evaluated outside its domain at r=" +
                             std::to_string(r));
    }

    // log S on the analytic part (r >= cap) for the capped families.
    Jet outer_log(double r) const {
        double m = n - 1;
        if (family == Family::exp_alpha) {
            if (r == 0.0)
                return {0.0, alpha == 1.0 ? -1.0 : -INFINITY, alpha == 1.0 ? 0.0 : INFINITY};
            double ra = std::pow(r, alpha);
            return {-ra, -alpha * ra / r, -alpha * (alpha - 1.0) * ra / (r * r)};
        }
        double p = m * beta;
        return {p * std::log(r), p / r, -p / (r * r)};
    }

    double table_log_psi(double r) const {
        if (r <= tr.front()) return tlog.front();
        if (r >= tr.back()) return tlog.back();
        auto it = std::upper_bound(tr.begin(), tr.end(), r);
        std::size_t k = static_cast<std::size_t>(it - tr.begin()) - 1;
        double w = (r - tr[k]) / (tr[k + 1] - tr[k]);
        return tlog[k] + w * (tlog[k + 1] - tlog[k]);
    }

    Jet log_area(double r) const {
        check(r);
        double m = n - 1;
        switch (family) {
            case Family::exp_alpha:
                if (cap > 0.0 && r < cap) return cubic(r);
                return outer_log(r);
            case Family::euclidean:
                return {m * std::log(r), m / r, -m / (r * r)};
            case Family::power:
                if (cap > 0.0 && r < cap) return cubic(r);
                if (beta == 0.0) return {0.0, 0.0, 0.0};
                return outer_log(r);
            case Family::hyperbolic: {
                double sh = std::sinh(r);
                return {m * log_sinh(r), m / std::tanh(r), r > 300.0 ? 0.0 : -m / (sh * sh)};
            }
            case Family::rlogr:
                if (r <= 1.0) return {std::log(r), 1.0 / r, -1.0 / (r * r)};
                if (r >= 2.0) {
                    double lr = std::log(r);
                    return log_of({r * lr, lr + 1.0, 1.0 / r});
                }
                return quintic(1.0, 2.0, {0.0, 1.0, -1.0}, log_of({2.0 * std::log(2.0), std::log(2.0) + 1.0, 0.5}),
                               r);
            case Family::table: {
                // Central differences of log psi with the local node spacing,
                // one-sided where the stencil would leave the table.
                auto it = std::upper_bound(tr.begin(), tr.end(), r);
                std::size_t k = it == tr.begin() ? 0 : static_cast<std::size_t>(it - tr.begin()) - 1;
                if (k + 1 >= tr.size()) k = tr.size() - 2;
                double h = tr[k + 1] - tr[k];
                double c = std::clamp(r, tr.front() + h, tr.back() - h);
                double lm = table_log_psi(c - h), l0 = table_log_psi(c), lp = table_log_psi(c + h);
                return {m * table_log_psi(r), m * (lp - lm) / (2 * h), m * (lp - 2 * l0 + lm) / (h * h)};
            }
            case Family::two_end: {
                if (r >= join) return plus->log_area(r);
                if (r <= -join) {
                    Jet j = minus->log_area(-r);
                    return {j.f, -j.d1, j.d2};
                }
                return quintic(-join, join, blend_lo, blend_hi, r);
            }
        }
        return {};
    }

    Jet area(double r) const {
        check(r);
        double m = n - 1;
        switch (family) {
            case Family::euclidean:
            case Family::power: {
                if (family == Family::power && cap > 0.0) break;
                double p = family == Family::euclidean ? m : m * beta;
                if (p == 0.0) return {1.0, 0.0, 0.0};
                double s = std::pow(r, p);
                double s1 = p * std::pow(r, p - 1.0);
                double s2 = (p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(r, p - 2.0);
                return {s, s1, s2};
            }
            case Family::hyperbolic: {
                if (r > 300.0) break;
                double ps = std::sinh(r), pc = std::cosh(r);
                double s = std::pow(ps, m);
                double s1 = m * std::pow(ps, m - 1.0) * pc;
                double s2 = m * std::pow(ps, m - 1.0) * ps;
                if (m > 1.0) s2 += m * (m - 1.0) * std::pow(ps, m - 2.0) * pc * pc;
                return {s, s1, s2};
            }
            case Family::rlogr:
                if (r <= 1.0) return {r, 1.0, 0.0};
                break;
            default:
                break;
        }
        return exp_of_log(log_area(r));
    }

    Jet psi(double r) const {
        if (family == Family::euclidean) {
            check(r);
            return {r, 1.0, 0.0};
        }
        if (family == Family::hyperbolic && r <= 300.0) {
            check(r);
            return {std::sinh(r), std::cosh(r), std::sinh(r)};
        }
        if (n == 2) return area(r);
        Jet l = log_area(r);
        double m = n - 1;
        return exp_of_log({l.f / m, l.d1 / m, l.d2 / m});
    }
};

namespace {

void require_dim(int n) {
    if (n < 2) throw ArgumentError("dimension n must be >= 2, got " + std::to_string(n));
}

}  // namespace

RadialProfile RadialProfile::exp_alpha(double alpha, int n, double cap_radius) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0,1]");
    require_dim(n);
    if (cap_radius < 0.0) throw ArgumentError("cap_radius must be nonnegative");
    auto p = std::make_shared<Impl>();
    p->family = Family::exp_alpha;
    p->alpha = alpha;
    p->n = n;
    p->cap = cap_radius;
    if (cap_radius > 0.0) p->cubic = CapCubic(cap_radius, p->outer_log(cap_radius));
    return RadialProfile(p);
}

RadialProfile RadialProfile::euclidean(int n) {
    require_dim(n);
    auto p = std::make_shared<Impl>();
    p->family = Family::euclidean;
    p->n = n;
    return RadialProfile(p);
}

RadialProfile RadialProfile::power(double beta, int n, double cap_radius) {
    require_dim(n);
    if (cap_radius < 0.0) throw ArgumentError("cap_radius must be nonnegative");
    auto p = std::make_shared<Impl>();
    p->family = Family::power;
    p->beta = beta;
    p->n = n;
    p->cap = beta == 0.0 ? 0.0 : cap_radius;
    if (p->cap > 0.0) p->cubic = CapCubic(p->cap, p->outer_log(p->cap));
    return RadialProfile(p);
}

RadialProfile RadialProfile::hyperbolic(int n) {
    require_dim(n);
    auto p = std::make_shared<Impl>();
    p->family = Family::hyperbolic;
    p->n = n;
    return RadialProfile(p);
}

RadialProfile RadialProfile::rlogr() {
    auto p = std::make_shared<Impl>();
    p->family = Family::rlogr;
    p->n = 2;
    return RadialProfile(p);
}

RadialProfile RadialProfile::table(std::vector<double> r, std::vector<double> psi, int n) {
    require_dim(n);
    if (r.size() < 3 || r.size() != psi.size())
        throw ArgumentError("table profile needs >= 3 nodes with matching values");
    auto p = std::make_shared<Impl>();
    p->family = Family::table;
    p->n = n;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (k > 0 && !(r[k] > r[k - 1])) throw ArgumentError("table nodes must be increasing");
        if (!(psi[k] > 0.0)) throw ArgumentError("table values must be positive");
        p->tlog.push_back(std::log(psi[k]));
    }
    p->tr = std::move(r);
    return RadialProfile(p);
}

RadialProfile RadialProfile::table_from_csv(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table file " + path);
    std::string line;
    std::getline(in, line);
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "r,psi") throw ConfigError("table file " + path + " must have header r,psi");
    std::vector<double> r, psi;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ": expected r,psi", lineno);
        try {
            r.push_back(std::stod(line.substr(0, comma)));
            psi.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError(path + ": bad number", lineno);
        }
    }
    return table(std::move(r), std::move(psi), n);
}

RadialProfile RadialProfile::two_end(const RadialProfile& plus, const RadialProfile& minus, double join) {
    if (plus.domain() != Domain::half_line || minus.domain() != Domain::half_line)
        throw ArgumentError("two_end: both ends must be half-line profiles");
    if (plus.dim() != minus.dim()) throw ArgumentError("two_end: ends must share the dimension");
    if (!(join > 0.0)) throw ArgumentError("two_end: join radius must be positive");
    auto p = std::make_shared<Impl>();
    p->family = Family::two_end;
    p->domain = Domain::full_line;
    p->n = plus.dim();
    p->alpha = plus.alpha();
    p->plus = plus.impl_;
    p->minus = minus.impl_;
    p->join = join;
    p->cap = join;
    Jet m = minus.log_area(join);
    p->blend_lo = {m.f, -m.d1, m.d2};
    p->blend_hi = plus.log_area(join);
    return RadialProfile(p);
}

RadialProfile RadialProfile::on_full_line() const {
    if (!(impl_->family == Family::power && impl_->beta == 0.0))
        throw ArgumentError("only the constant-area profile extends to the full line");
    auto p = std::make_shared<Impl>(*impl_);
    p->domain = Domain::full_line;
    return RadialProfile(p);
}

Family RadialProfile::family() const { return impl_->family; }
Domain RadialProfile::domain() const { return impl_->domain; }
int RadialProfile::dim() const { return impl_->n; }
double RadialProfile::alpha() const { return impl_->alpha; }
double RadialProfile::beta() const { return impl_->beta; }
double RadialProfile::cap_radius() const { return impl_->cap; }
double RadialProfile::r_min() const { return impl_->r_min(); }
double RadialProfile::r_max() const { return impl_->r_max(); }
Jet RadialProfile::log_area(double r) const { return impl_->log_area(r); }
Jet RadialProfile::area(double r) const { return impl_->area(r); }
Jet RadialProfile::psi(double r) const { return impl_->psi(r); }

std::optional<RadialProfile> RadialProfile::plus() const {
    if (!impl_->plus) return std::nullopt;
    return RadialProfile(impl_->plus);
}

std::optional<RadialProfile> RadialProfile::minus() const {
    if (!impl_->minus) return std::nullopt;
    return RadialProfile(impl_->minus);
}

std::string RadialProfile::describe() const {
    std::ostringstream os;
    os.precision(17);
    const Impl& p = *impl_;
    os << "family=" << to_string(p.family);
    switch (p.family) {
        case Family::exp_alpha: os << " alpha=" << p.alpha << " n=" << p.n << " cap_radius=" << p.cap; break;
        case Family::power: os << " beta=" << p.beta << " n=" << p.n << " cap_radius=" << p.cap; break;
        case Family::euclidean:
        case Family::hyperbolic: os << " n=" << p.n; break;
        case Family::table: os << " n=" << p.n << " nodes=" << p.tr.size(); break;
        case Family::rlogr: break;
        case Family::two_end:
            os << " join=" << p.join << " plus=(" << RadialProfile(p.plus).describe() << ") minus=("
               << RadialProfile(p.minus).describe() << ")";
            break;
    }
    if (p.domain == Domain::full_line && p.family != Family::two_end) os << " domain=full_line";
    return os.str();
}

RadialProfile parse_profile(const std::string& spec) {
    std::map<std::string, std::string> kv;
    std::istringstream is(spec);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("profile token without '=': " + tok);
        std::string key = tok.substr(0, eq);
        if (kv.count(key)) throw ConfigError("duplicate profile key: " + key);
        kv[key] = tok.substr(eq + 1);
    }
    static const char* allowed[] = {"family", "alpha", "n", "beta", "cap_radius", "path", "domain"};
    for (auto& [k, v] : kv) {
        if (std::find_if(std::begin(allowed), std::end(allowed), [&](const char* a) { return k == a; }) ==
            std::end(allowed))
            throw ConfigError("unknown profile key: " + k);
    }
    auto num = [&](const std::string& key, double dflt, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw ConfigError("profile requires key: " + key);
            return dflt;
        }
        try {
            std::size_t used = 0;
            double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("profile key " + key + " is not a number: " + it->second);
        }
    };
    auto integer = [&](const std::string& key, int dflt) {
        double v = num(key, dflt, false);
        if (v != std::floor(v) || v < 2) throw ConfigError("profile key n must be an integer >= 2");
        return static_cast<int>(v);
    };
    if (!kv.count("family")) throw ConfigError("profile requires key: family");
    const std::string& fam = kv["family"];
    int n = integer("n", 2);
    RadialProfile out = RadialProfile::euclidean(2);
    if (fam == "exp_alpha") {
        double a = num("alpha", 0, true);
        if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha=" + kv["alpha"] + " out of range (0,1]");
        double cap = num("cap_radius", 0.5, false);
        if (cap < 0.0) throw ConfigError("cap_radius must be nonnegative");
        out = RadialProfile::exp_alpha(a, n, cap);
    } else if (fam == "euclidean") {
        out = RadialProfile::euclidean(n);
    } else if (fam == "power") {
        double cap = num("cap_radius", 0.0, false);
        if (cap < 0.0) throw ConfigError("cap_radius must be nonnegative");
        out = RadialProfile::power(num("beta", 0, true), n, cap);
    } else if (fam == "hyperbolic") {
        out = RadialProfile::hyperbolic(n);
    } else if (fam == "rlogr") {
        if (n != 2) throw ConfigError("rlogr is two-dimensional");
        out = RadialProfile::rlogr();
    } else if (fam == "table") {
        if (!kv.count("path")) throw ConfigError("profile requires key: path");
        std::string path = kv["path"];
        if (path.rfind("csv(", 0) == 0 && path.back() == ')') path = path.substr(4, path.size() - 5);
        out = RadialProfile::table_from_csv(path, n);
    } else {
        throw ConfigError("unknown profile family: " + fam);
    }
    if (kv.count("domain")) {
        if (kv["domain"] == "full_line") {
            try {
                out = out.on_full_line();
            } catch (const ArgumentError& e) {
                throw ConfigError(e.what());
            }
        } else if (kv["domain"] != "half_line") {
            throw ConfigError("domain must be half_line or full_line");
        }
    }
    return out;
}

}  // namespace heatlab
