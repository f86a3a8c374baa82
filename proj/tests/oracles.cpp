#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dvlab::oracle {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1].
constexpr long double kXgk[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
constexpr long double kWgk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr long double kWg[4] = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

std::pair<long double, long double> gk15(const std::function<long double(long double)>& f,
                                         long double lo, long double hi) {
    const long double c = 0.5L * (lo + hi);
    const long double h = 0.5L * (hi - lo);
    const long double fc = f(c);
    long double kronrod = fc * kWgk[7];
    long double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const long double dx = h * kXgk[j];
        const long double f1 = f(c - dx);
        const long double f2 = f(c + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    return {kronrod * h, std::fabs((kronrod - gauss) * h)};
}

struct Segment {
    long double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Integral of t^{a-1}(1-t)^{b-1} over [lo, hi] within [0,1], split at 1/2.
long double beta_integral(long double lo, long double hi, long double a, long double b) {
    // Scale by the integrand's peak so the absolute tolerance acts relatively.
    long double log_peak = 0.0L;
    if (a > 1.0L && b > 1.0L) {
        const long double mode = (a - 1.0L) / (a + b - 2.0L);
        log_peak = (a - 1.0L) * std::log(mode) + (b - 1.0L) * std::log1p(-mode);
    }
    long double total = 0.0L;
    const long double split = 0.5L;
    if (lo < split) {
        // t = u^2, dt = 2u du
        const long double u_hi = std::sqrt(std::min(hi, split));
        const long double u_lo = std::sqrt(lo);
        total += integrate(
            [a, b, log_peak](long double u) {
                if (u == 0.0L) return a == 0.5L ? 2.0L : 0.0L;
                const long double t = u * u;
                return 2.0L * std::pow(u, 2.0L * a - 1.0L) * std::exp((b - 1.0L) * std::log1p(-t) - log_peak);
            },
            u_lo, u_hi);
    }
    if (hi > split) {
        // t = 1 - v^2, dt = -2v dv
        const long double v_lo = std::sqrt(1.0L - hi);
        const long double v_hi = std::sqrt(1.0L - std::max(lo, split));
        total += integrate(
            [a, b, log_peak](long double v) {
                if (v == 0.0L) return b == 0.5L ? 2.0L : 0.0L;
                const long double t = 1.0L - v * v;
                return 2.0L * std::pow(v, 2.0L * b - 1.0L) * std::exp((a - 1.0L) * std::log(t) - log_peak);
            },
            v_lo, v_hi);
    }
    return total;
}

}  // namespace

long double integrate(const std::function<long double(long double)>& f, long double lo,
                      long double hi, long double abs_tol, int max_depth) {
    if (hi <= lo) return 0.0L;
    // Global adaptive: always bisect the segment with the largest error.
    std::priority_queue<Segment> queue;
    auto [v0, e0] = gk15(f, lo, hi);
    queue.push({lo, hi, v0, e0});
    long double total_error = e0;
    const int max_segments = 200 * max_depth;
    for (int n = 1; total_error > abs_tol && n < max_segments; ++n) {
        Segment worst = queue.top();
        queue.pop();
        const long double mid = 0.5L * (worst.lo + worst.hi);
        auto [vl, el] = gk15(f, worst.lo, mid);
        auto [vr, er] = gk15(f, mid, worst.hi);
        total_error += el + er - worst.error;
        queue.push({worst.lo, mid, vl, el});
        queue.push({mid, worst.hi, vr, er});
    }
    std::vector<long double> parts;
    while (!queue.empty()) {
        parts.push_back(queue.top().value);
        queue.pop();
    }
    std::sort(parts.begin(), parts.end(), [](long double a, long double b) { return std::fabs(a) < std::fabs(b); });
    long double sum = 0.0L;
    for (long double p : parts) sum += p;
    return sum;
}

double incomplete_beta_quadrature(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const long double full = beta_integral(0.0L, 1.0L, a, b);
    const long double part = beta_integral(0.0L, x, a, b);
    return static_cast<double>(part / full);
}

double cap_mean_angle(double alpha, std::size_t k) {
    const long double e = static_cast<long double>(k) - 2.0L;
    auto density = [e](long double t) { return std::pow(std::sin(t), e); };
    const long double mass = integrate(density, 0.0L, alpha, 1e-20L);
    const long double first = integrate([&](long double t) { return t * density(t); }, 0.0L, alpha, 1e-20L);
    return static_cast<double>(first / mass);
}

std::vector<std::pair<std::string, double>> sort_and_cut(std::vector<std::pair<std::string, double>> scored,
                                                         std::size_t top_k) {
    std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) {
        if (l.second != r.second) return l.second > r.second;
        return l.first < r.first;
    });
    if (scored.size() > top_k) scored.resize(top_k);
    return scored;
}

std::vector<double> dense_scores(Similarity kind, const std::vector<std::vector<double>>& docs,
                                 const std::vector<double>& q) {
    std::vector<double> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        long double qd = 0, qq = 0, dd = 0, sq = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            qd += static_cast<long double>(q[i]) * d[i];
            qq += static_cast<long double>(q[i]) * q[i];
            dd += static_cast<long double>(d[i]) * d[i];
            const long double diff = static_cast<long double>(q[i]) - d[i];
            sq += diff * diff;
        }
        long double s = 0;
        switch (kind) {
            case Similarity::cosine: s = qd / (std::sqrt(qq) * std::sqrt(dd)); break;
            case Similarity::dot: s = qd; break;
            case Similarity::euclidean: s = -std::sqrt(sq); break;
        }
        out.push_back(static_cast<double>(s));
    }
    return out;
}

std::vector<std::string> tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        const bool ascii_alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (ascii_alnum || c >= 0x80) {
            cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> bm25_scores(const std::vector<std::vector<std::string>>& doc_tokens, const std::string& query,
                                double k1, double b) {
    std::vector<std::string> terms;
    for (const auto& t : tokens(query)) {
        if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
    }
    const long double n = doc_tokens.size();
    long double total = 0;
    for (const auto& d : doc_tokens) total += d.size();
    const long double avgdl = total / n;
    // per-document weights, summed in ascending order at the end
    std::vector<std::vector<long double>> parts(doc_tokens.size());
    for (const auto& t : terms) {
        long double df = 0;
        for (const auto& d : doc_tokens) df += std::find(d.begin(), d.end(), t) != d.end() ? 1 : 0;
        const long double idf = std::log(1.0L + (n - df + 0.5L) / (df + 0.5L));
        for (std::size_t i = 0; i < doc_tokens.size(); ++i) {
            const long double tf = std::count(doc_tokens[i].begin(), doc_tokens[i].end(), t);
            if (tf == 0) continue;
            const long double len = doc_tokens[i].size();
            parts[i].push_back(idf * tf * (k1 + 1.0L) / (tf + k1 * (1.0L - b + b * len / avgdl)));
        }
    }
    std::vector<double> scores;
    for (auto& p : parts) {
        std::sort(p.begin(), p.end());
        long double s = 0;
        for (long double x : p) s += x;
        scores.push_back(static_cast<double>(s));
    }
    return scores;
}

}  // namespace dvlab::oracle
