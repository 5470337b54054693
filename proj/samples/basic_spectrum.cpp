// Lowest few Landau levels, the boundary coefficients of one channel and the
// wall-induced eigenvalue in the first gap.
#include <cstdio>

#include "lwall/landau.hpp"
#include "lwall/spectrum.hpp"
#include "lwall/weyl.hpp"

int main() {
    using namespace lwall;
    const Params p{1.0, 1.1, -1.0};
    const int m = 2;

    for (int n = 0; n < 4; ++n)
        std::printf("Lambda_%d = %g   c_{%d,%d} = %.6e\n", n, landau_level(p.B, n), n, m,
                    boundary_coeff(p.B, p.a, n, m).to_real());

    for (double E : {1.5, 2.0, 2.5}) std::printf("mu_%d(%.1f) = %.12f\n", m, E, mu(p, m, E).value);

    for (auto cond : {ScalarCondition::PaperForm, ScalarCondition::BirmanSchwinger}) {
        const auto r = solve_mode(p, m, Gap::between(p.B, 0), cond);
        if (r)
            std::printf("%s root in (Lambda_0, Lambda_1): E = %.14f\n",
                        cond == ScalarCondition::PaperForm ? "paper" : "bs", r->E);
        else
            std::printf("no root\n");
    }
}
