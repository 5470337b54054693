// Walk the accumulation of eigenvalues at the lowest level as |m| grows.
#include <cstdio>

#include "lwall/spectrum.hpp"
#include "lwall/weyl.hpp"

int main() {
    using namespace lwall;
    const Params p{1.0, 1.1, -1.0};
    std::printf("%4s %14s %14s %10s\n", "m", "shift", "c/|alpha|", "ratio");
    for (const auto& r : cluster(p, 0, ScalarCondition::PaperForm)) {
        if (r.m % 4) continue;
        const double pred = predicted_shift(p, 0, r.m, ScalarCondition::PaperForm);
        std::printf("%4d %14.6e %14.6e %10.6f\n", r.m, r.shift, pred, r.shift / pred);
    }
}
