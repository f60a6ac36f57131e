#include "tepforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace tepforge {

namespace {

// QUADPACK 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
                            0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
                            0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

}  // namespace

double gk15(const RealFn& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    err = std::fabs(kron - gauss);
    return kron;
}

double integrate(const RealFn& f, double a, double b, double abs_tol, int init_panels, int max_panels) {
    if (!(b > a)) return 0.0;
    struct Panel {
        double a, b, val, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    double total = 0, total_err = 0;
    const double w = (b - a) / init_panels;
    for (int i = 0; i < init_panels; ++i) {
        Panel p;
        p.a = a + i * w;
        p.b = (i + 1 == init_panels) ? b : a + (i + 1) * w;
        p.val = gk15(f, p.a, p.b, p.err);
        total += p.val;
        total_err += p.err;
        heap.push(p);
    }
    int panels = init_panels;
    while (total_err > abs_tol && panels < max_panels) {
        Panel p = heap.top();
        heap.pop();
        total -= p.val;
        total_err -= p.err;
        const double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b) {  // interval no longer splittable in doubles
            total += p.val;
            total_err += p.err;
            break;
        }
        for (int half = 0; half < 2; ++half) {
            Panel q;
            q.a = half ? m : p.a;
            q.b = half ? p.b : m;
            q.val = gk15(f, q.a, q.b, q.err);
            total += q.val;
            total_err += q.err;
            heap.push(q);
        }
        ++panels;
    }
    if (total_err > abs_tol * 8 + 1e-300)
        throw QuadratureError("integrate: tolerance not reached (achieved " + std::to_string(total_err) + ")",
                              total_err);
    return total;
}

CumulativeCdf::CumulativeCdf(RealFn pdf, double hi, double abs_tol) : pdf_(std::move(pdf)), hi_(hi) {
    struct Panel {
        double a, b, val, err;
    };
    std::vector<Panel> work;
    const int init = 32;
    for (int i = 0; i < init; ++i) {
        Panel p;
        p.a = hi * i / init;
        p.b = hi * (i + 1) / init;
        p.val = gk15(pdf_, p.a, p.b, p.err);
        work.push_back(p);
    }
    const double per_panel_tol = abs_tol / 64;
    std::vector<Panel> done;
    int guard = 0;
    while (!work.empty()) {
        Panel p = work.back();
        work.pop_back();
        if (p.err <= per_panel_tol || p.b - p.a < 1e-13 * hi || ++guard > 200000) {
            done.push_back(p);
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        Panel l{p.a, m, 0, 0}, r{m, p.b, 0, 0};
        l.val = gk15(pdf_, l.a, l.b, l.err);
        r.val = gk15(pdf_, r.a, r.b, r.err);
        work.push_back(r);
        work.push_back(l);
    }
    std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    edges_.reserve(done.size() + 1);
    prefix_.reserve(done.size());
    edges_.push_back(0.0);
    double acc = 0;
    for (const Panel& p : done) {
        acc += p.val;
        edges_.push_back(p.b);
        prefix_.push_back(acc);
    }
}

double CumulativeCdf::operator()(double x) const {
    if (x <= 0) return 0.0;
    if (x >= hi_) return total();
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    std::size_t idx = std::size_t(it - edges_.begin()) - 1;  // panel [edges_[idx], edges_[idx+1]) contains x
    double base = idx == 0 ? 0.0 : prefix_[idx - 1];
    double err;
    return base + gk15(pdf_, edges_[idx], x, err);
}

double find_support_upper(const RealFn& pdf, double initial_hi, double tail_tol) {
    double hi = initial_hi;
    for (int iter = 0; iter < 40; ++iter) {
        double err;
        double tail = gk15(pdf, hi, 2 * hi, err) + gk15(pdf, 2 * hi, 4 * hi, err);
        if (std::isfinite(tail) && std::fabs(tail) < tail_tol) return hi;
        hi *= 2;
    }
    throw QuadratureError("find_support_upper: tail mass does not vanish", INFINITY);
}

}  // namespace tepforge
