/* Diagnose a building from C.
 *
 *   cargo build --release -p thermoforce-ffi
 *   cc -Icrates/ffi/include crates/ffi/examples/diagnose.c \
 *      target/release/libthermoforce_ffi.a -lpthread -ldl -lm -o diagnose
 *   ./diagnose crates/core/data/door_defect.bld crates/core/data/weather_5day.csv \
 *      crates/core/data/reference_measurements.csv
 */
#include <stdio.h>
#include <stdlib.h>

#include "thermoforce.h"

static int fail(const char *what)
{
    fprintf(stderr, "%s: %s\n", what, tf_last_error());
    return 1;
}

int main(int argc, char **argv)
{
    TfModel *model = NULL;
    TfWeather *weather = NULL;
    TfMeasurements *meas = NULL;
    TfReport *report = NULL;
    TfGaParams params;
    size_t i, count;
    size_t *nodes;

    if (argc != 4) {
        fprintf(stderr, "usage: %s BUILDING WEATHER MEASUREMENTS\n", argv[0]);
        return 2;
    }
    if (tf_model_from_file(argv[1], &model) != TF_STATUS_OK)
        return fail(argv[1]);
    if (tf_weather_from_file(argv[2], &weather) != TF_STATUS_OK)
        return fail(argv[2]);
    if (tf_measurements_from_file(argv[3], &meas) != TF_STATUS_OK)
        return fail(argv[3]);

    tf_ga_params_default(&params);
    params.exhaustive = true;
    if (tf_diagnose(model, weather, meas, &params, &report) != TF_STATUS_OK)
        return fail("diagnose");

    count = tf_report_forced_count(report);
    nodes = calloc(count ? count : 1, sizeof *nodes);
    tf_report_forced_nodes(report, nodes, count);
    printf("J unforced %g, best %g with nodes:", tf_report_unforced_objective(report),
           tf_report_best_objective(report));
    for (i = 0; i < count; i++) {
        char label[64];
        tf_model_node_label(model, nodes[i], label, sizeof label, NULL);
        printf(" %zu (%s)", nodes[i], label);
    }
    printf("\n");

    free(nodes);
    tf_report_free(report);
    tf_measurements_free(meas);
    tf_weather_free(weather);
    tf_model_free(model);
    return 0;
}
