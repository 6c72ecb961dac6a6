#ifndef RIEMOC_TESTS_EXPR_CASES_HPP
#define RIEMOC_TESTS_EXPR_CASES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

// Golden expression cases: hand-computed values and derivatives, all exactly
// representable so the assertions can use ==.
struct GoldenExpr {
    const char* src;
    int n;
    std::array<double, 3> x;
    double value;
    int daxis; // 1-based
    double dvalue;
};

inline const std::vector<GoldenExpr>& golden_exprs() {
    static const std::vector<GoldenExpr> cases = {
        {"x1 + 2*x2", 2, {1, 3, 0}, 7.0, 2, 2.0},
        {"2^3^2", 1, {0, 0, 0}, 512.0, 1, 0.0},
        {"x1*x2", 2, {2, 4, 0}, 8.0, 1, 4.0},
        {"x1^3", 1, {2, 0, 0}, 8.0, 1, 12.0},
        {"sin(x1)", 1, {0, 0, 0}, 0.0, 1, 1.0},
        {"cos(x1)", 1, {0, 0, 0}, 1.0, 1, 0.0},
        {"exp(x1)", 1, {0, 0, 0}, 1.0, 1, 1.0},
        {"sqrt(x1)", 1, {4, 0, 0}, 2.0, 1, 0.25},
        {"abs(x1)", 1, {-3, 0, 0}, 3.0, 1, -1.0},
        {"sgn(x1)", 1, {-0.5, 0, 0}, -1.0, 1, 0.0},
        {"log(x1)", 1, {1, 0, 0}, 0.0, 1, 1.0},
        {"1/x1", 1, {4, 0, 0}, 0.25, 1, -0.0625},
        {"x1^2 + x2^2", 2, {3, 4, 0}, 25.0, 1, 6.0},
        {"(x1 + x2)*(x1 - x2)", 2, {5, 3, 0}, 16.0, 1, 10.0},
        {"x1/x2", 2, {1, 4, 0}, 0.25, 2, -0.0625},
        {"exp(-2*(x1+x2))", 2, {0, 0, 0}, 1.0, 2, -2.0},
        {"2*x1^2 - 3*x1 + 1", 1, {2, 0, 0}, 3.0, 1, 5.0},
        {"sqrt(x1^2)", 1, {3, 0, 0}, 3.0, 1, 1.0},
        {"x1^0.5", 1, {16, 0, 0}, 4.0, 1, 0.125},
        {"abs(x1*x2)", 2, {-2, 3, 0}, 6.0, 1, -3.0},
    };
    return cases;
}

// Deterministic generator of smooth random expression strings over x1..xn.
// Smooth node set only (no /, log, sqrt, abs, sgn), exponential arguments
// damped, so central differences are a valid oracle everywhere.
class SmoothExprGen {
public:
    explicit SmoothExprGen(std::uint64_t seed) : state_(seed) {}

    std::string generate(int n, int depth = 4) { return gen(n, depth); }

    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return buf;
    }

    std::string gen(int n, int depth) {
        if (depth == 0) {
            if (uniform() < 0.5) return num(4.0 * uniform() - 2.0);
            int k = 1 + static_cast<int>(uniform() * n);
            if (k > n) k = n;
            return "x" + std::to_string(k);
        }
        double r = uniform();
        if (r < 0.25)
            return "(" + gen(n, depth - 1) + " + " + gen(n, depth - 1) + ")";
        if (r < 0.45)
            return "(" + gen(n, depth - 1) + " - " + gen(n, depth - 1) + ")";
        if (r < 0.65)
            return "(" + gen(n, depth - 1) + ")*(" + gen(n, depth - 1) + ")";
        if (r < 0.78) return "sin(" + gen(n, depth - 1) + ")";
        if (r < 0.91) return "cos(" + gen(n, depth - 1) + ")";
        return "exp(0.3*(" + gen(n, depth - 1) + "))";
    }

    std::uint64_t state_;
};

#endif
