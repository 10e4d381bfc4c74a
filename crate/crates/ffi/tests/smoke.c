#include <math.h>
#include <stdio.h>
#include <string.h>

#include "blaschke.h"

#define N 256

static int fail(const char *what) {
    const char *msg = bl_last_error_message();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    double re[N], im[N];
    for (int j = 0; j < N; j++) {
        double t = 2.0 * M_PI * j / N;
        /* 1 + z^2/2 + z^5/8 */
        re[j] = 1.0 + 0.5 * cos(2 * t) + 0.125 * cos(5 * t);
        im[j] = 0.5 * sin(2 * t) + 0.125 * sin(5 * t);
    }
    BlSignal *sig = NULL;
    if (bl_signal_new(re, im, N, 2.0 * M_PI, &sig) != BL_STATUS_OK) return fail("signal");

    BlUnwindOptions opt = bl_unwind_options_default();
    opt.depth = 2;
    opt.stabilizer = 1e-8;
    BlDecomposition *dec = NULL;
    if (bl_unwind(sig, &opt, &dec) != BL_STATUS_OK) return fail("unwind");
    if (bl_decomposition_depth(dec) != 2) return fail("depth");

    BlSignal *c = NULL;
    if (bl_decomposition_component(dec, 1, &c) != BL_STATUS_OK) return fail("component");
    double cr[N], ci[N];
    if (bl_signal_copy(c, cr, ci, N) != BL_STATUS_OK) return fail("copy");
    for (int j = 0; j < N; j++) {
        double t = 2.0 * M_PI * j / N;
        if (fabs(cr[j] - 0.125 * cos(5 * t)) > 1e-8 || fabs(ci[j] - 0.125 * sin(5 * t)) > 1e-8) return fail("values");
    }

    BlSignal *b = NULL;
    if (bl_weiss_factorize(c, 1e-4, &b, NULL) != BL_STATUS_OK) return fail("factorize");
    double w = 0.0;
    if (bl_winding_number(b, &w) != BL_STATUS_OK || fabs(w - 5.0) > 1e-9) return fail("winding");

    if (bl_decomposition_component(dec, 7, &c) != BL_STATUS_INVALID_ARGUMENT) return fail("range check");
    if (strstr(bl_last_error_message(), "out of range") == NULL) return fail("message");

    bl_signal_free(b);
    bl_signal_free(c);
    bl_decomposition_free(dec);
    bl_signal_free(sig);
    printf("ok %s\n", bl_version());
    return 0;
}
