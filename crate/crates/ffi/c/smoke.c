#include <math.h>
#include <stdio.h>

#include "scorekit.h"

#define CHECK(call)                                                              \
    do {                                                                         \
        ScorekitStatus s_ = (call);                                              \
        if (s_ != SCOREKIT_STATUS_OK) {                                          \
            const char *m_ = scorekit_last_error_message();                      \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, m_ ? m_ : "");     \
            return 1;                                                            \
        }                                                                        \
    } while (0)

int main(void) {
    ScorekitDensity *normal = NULL;
    CHECK(scorekit_density_builtin("normal", NULL, NULL, 0, &normal));

    double phi = 0.0;
    CHECK(scorekit_location_score(normal, 2.0, &phi));
    if (fabs(phi + 2.0) > 1e-12) {
        fprintf(stderr, "phi(2) = %g\n", phi);
        return 1;
    }

    ScorekitVarianceBounds vb;
    CHECK(scorekit_variance_bounds(normal, "sin(x)", &vb));
    if (!(vb.variance <= vb.chernoff)) {
        fprintf(stderr, "variance %g above chernoff %g\n", vb.variance, vb.chernoff);
        return 1;
    }

    ScorekitSkewModel *sn = NULL;
    CHECK(scorekit_skew_model_new("skew-normal", &sn));
    ScorekitFisherInfo info;
    CHECK(scorekit_fisher_info(sn, &info));
    if (info.rank != 2) {
        fprintf(stderr, "skew-normal rank %u\n", info.rank);
        return 1;
    }

    ScorekitDensity *bogus = NULL;
    if (scorekit_density_builtin("nope", NULL, NULL, 0, &bogus) != SCOREKIT_STATUS_INVALID_INPUT) {
        fprintf(stderr, "unknown family accepted\n");
        return 1;
    }

    scorekit_skew_model_free(sn);
    scorekit_density_free(normal);
    printf("scorekit %s ok\n", scorekit_version());
    return 0;
}
