#ifndef TEPFORGE_QUADRATURE_HPP
#define TEPFORGE_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tepforge {

using RealFn = std::function<double(double)>;

class QuadratureError : public std::runtime_error {
   public:
    QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_tol(achieved) {}
    double achieved_tol;
};

// Gauss-Kronrod 7-15 rule on [a,b]; err receives |K15 - G7|.
double gk15(const RealFn& f, double a, double b, double& err);

// Adaptive bisection of GK15 panels to an absolute tolerance. The interval is
// pre-split into init_panels before refinement so isolated bumps are not missed.
double integrate(const RealFn& f, double a, double b, double abs_tol = 1e-9, int init_panels = 24,
                 int max_panels = 20000);

// Piecewise antiderivative of a nonnegative density on [0, hi]: panel
// boundaries with prefix sums, partial panels finished with one GK15 pass.
class CumulativeCdf {
   public:
    CumulativeCdf() = default;
    CumulativeCdf(RealFn pdf, double hi, double abs_tol = 1e-11);

    double operator()(double x) const;
    double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }
    double hi() const { return hi_; }

   private:
    RealFn pdf_;
    double hi_ = 0;
    std::vector<double> edges_;   // ascending, edges_.front() == 0
    std::vector<double> prefix_;  // prefix_[i] = integral over [0, edges_[i+1]]
};

// Doubles hi until the pdf mass beyond it is negligible (< tail_tol).
double find_support_upper(const RealFn& pdf, double initial_hi, double tail_tol = 1e-13);

}  // namespace tepforge

#endif
