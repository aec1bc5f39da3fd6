#include <stdio.h>
#include <math.h>
#include "lgt.h"

int main(void) {
    unsigned long long total = 0, axial = 0, fr = 0;
    if (lgt_edge_counts(2, 7, (uint64_t*)&total, (uint64_t*)&axial, (uint64_t*)&fr) != LGT_STATUS_OK) return 1;
    if (total != 84 || axial != 48 || fr != 36) return 2;

    LgtLattice *lat = NULL;
    if (lgt_lattice_new(3, 6, &lat) != LGT_STATUS_OK) return 3;
    double k = 0.0, fm = 0.0;
    if (lgt_knd(lat, &k) != LGT_STATUS_OK) return 4;
    if (lgt_maxwell_free_energy(lat, &fm) != LGT_STATUS_OK) return 5;
    lgt_lattice_free(lat);
    if (fabs(k - (-0.494010986)) > 1e-6) return 6;

    double c = 0.0, lie = 0.0;
    lgt_small_ball_constant(2, &c, &lie);
    if (fabs(c - 0.019894367886486918) > 1e-12) return 7;

    double f = 0.0;
    lgt_exact_2d_free_energy(6, 4.0, &f);
    if (fabs(f - (-1.0937688920031532)) > 1e-9) return 8;

    double p = 0.0, se = 0.0;
    if (lgt_small_ball_estimate(1, 0.1, 200000, 42, &p, &se) != LGT_STATUS_OK) return 9;
    if (fabs(p - 2.0/M_PI*asin(0.05)) > 4*se) return 10;

    if (lgt_lattice_new(1, 4, &lat) != LGT_STATUS_INVALID_ARGUMENT) return 11;

    char *v = lgt_version();
    printf("lgt %s: K_{6,3}=%.9f F_M=%.9f smallball_c2=%.9f exact2d=%.9f p=%.5f\n", v, k, fm, c, f, p);
    lgt_string_free(v);
    return 0;
}
