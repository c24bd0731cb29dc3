// Clusters a synthetic Gaussian mixture with k-means++, greedy multi-swap
// local search and Lloyd, printing the cost after each stage.
#include <iostream>

#include "msls/msls.hpp"

int main() {
    msls::Rng rng(42);
    msls::MixtureSpec spec;
    spec.n = 5000;
    spec.dim = 10;
    spec.components = 20;
    spec.sigma = 0.06;
    const auto mixture = msls::make_gaussian_mixture(spec, rng);
    const auto data = msls::minmax_scale(mixture.data);

    auto init = msls::kmeanspp_seed(data, 20, rng);
    std::cout << "k-means++      " << msls::cost(data, init) << '\n';

    msls::LsConfig cfg;
    cfg.p = 4;
    cfg.steps = 50;
    cfg.seed = 7;
    auto [state, trajectory] = msls::run_local_search(data, init, cfg, msls::Variant::MslsGreedy);
    std::cout << "msls-g (p=4)   " << state.total_cost() << "  (" << trajectory.size() - 1 << " steps)\n";

    const auto refined = msls::lloyd_iterate(data, state.centers(), 10);
    std::cout << "+ 10 x Lloyd   " << (refined.costs.empty() ? state.total_cost() : refined.costs.back()) << '\n';
}
