// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when
// any fails.

#include "criteria.hpp"
#include "fixtures.hpp"

#include <cstdio>
#include <vector>

int main()
{
    fixtures::TempDir work("acceptance");
    std::vector<criteria::Result> results;
    auto run = [&](criteria::Result r) {
        std::printf("%s  %-36s %7.2f s  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
        results.push_back(std::move(r));
    };
    run(criteria::tfidf_oracle());
    run(criteria::logreg_gradient_check());
    run(criteria::knn_oracle());
    run(criteria::boosting_invariants());
    run(criteria::stacking_leakage());
    run(criteria::comparison_table(work.path()));
    run(criteria::cv_stability(work.path()));
    run(criteria::determinism(work.path()));
    run(criteria::grid_search(work.path()));

    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
