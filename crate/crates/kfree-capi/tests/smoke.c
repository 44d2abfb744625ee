/* Minimal consumer of the C API: sieve a tiny window, read its density,
 * pull the JSON, and run one stabiliser search. Compiled and executed by
 * the c_header_smoke test. */

#include <stdio.h>
#include <string.h>

#include "kfree.h"

int main(void) {
    KfPointSet *ps = NULL;
    KfStatus st = kf_pointset_sieve("{\"kind\":\"visible\",\"d\":2}", 1, 1, &ps);
    if (st != KF_STATUS_OK) {
        char *msg = kf_last_error_message();
        fprintf(stderr, "sieve failed: %s\n", msg ? msg : "?");
        kf_string_free(msg);
        return 1;
    }
    if (kf_pointset_len(ps) != 8 || kf_pointset_dim(ps) != 2) {
        return 2;
    }
    uint64_t num = 0, den = 0;
    if (kf_pointset_density(ps, &num, &den) != KF_STATUS_OK || num != 8 || den != 9) {
        return 3;
    }
    char *json = NULL;
    if (kf_pointset_to_json(ps, &json) != KF_STATUS_OK) {
        return 4;
    }
    if (strstr(json, "pointset/1") == NULL) {
        return 5;
    }
    kf_string_free(json);
    kf_pointset_free(ps);

    double z = 0.0;
    if (kf_zeta(2.0, 1e-12, &z) != KF_STATUS_OK || z < 1.64 || z > 1.65) {
        return 6;
    }

    bool exact = false;
    if (kf_stab_search("{\"kind\":\"kfree_ring\",\"ring\":\"gauss\",\"k\":2}", 1, 16, 1,
                       &exact, NULL) != KF_STATUS_OK ||
        !exact) {
        return 7;
    }

    /* negative path: stabiliser element has no witness */
    const int64_t rot[4] = {0, -1, 1, 0};
    if (kf_witness("gauss", 2, rot, 32, NULL) != KF_STATUS_PRECONDITION) {
        return 8;
    }
    printf("ok\n");
    return 0;
}
