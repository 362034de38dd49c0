// Prints the three stability-region boundaries side by side for a few
// delays, the numbers behind the comparison plots.

#include <cstdio>

#include "dgbm/dgbm.hpp"

int main() {
    std::printf("%8s %18s %18s %18s %14s\n", "tau", "sigma_asymptotic", "sigma_ehs",
                "sigma_exponential", "witness_mu");
    const double taus[] = {0.0, 0.05, 0.1, 0.2, 0.3, 0.35, 0.4, 0.6, 0.9};
    for (const double tau : taus) {
        const double asym = dgbm::asymptotic_sigma_max(tau);
        const double ehs = dgbm::region_curve(dgbm::RegionKind::ehs, {tau}).points[0].sigma_max;
        const auto expo = dgbm::exponential_sigma_max(tau);
        std::printf("%8.3f %18.10f %18.10f %18.10f", tau, asym, ehs, expo.sigma_max);
        if (expo.witness) {
            std::printf(" %14.6f", expo.witness->mu);
        } else {
            std::printf(" %14s", "-");
        }
        std::printf("\n");
    }
    return 0;
}
