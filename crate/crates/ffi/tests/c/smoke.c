#include <math.h>
#include <stdio.h>
#include "spw.h"

int main(void) {
    double outer[] = {-3, -3, 3, -3, 3, 3, -3, 3};
    double hole[] = {-0.5, -0.5, 0.5, -0.5, 0.5, 0.5, -0.5, 0.5};
    size_t lens[] = {4};
    double s[] = {-2, 0}, t[] = {2, 0};
    SpwInstance *inst = NULL;
    if (spw_instance_new(outer, 4, hole, lens, 1, s, t, &inst) != SPW_STATUS_OK) {
        fprintf(stderr, "new: %s\n", spw_last_error());
        return 1;
    }
    SpwResult *res = NULL;
    if (spw_solve(inst, &res) != SPW_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", spw_last_error());
        return 1;
    }
    double xy[2];
    size_t n = spw_result_path_len(res);
    spw_result_path_point(res, n - 1, xy);
    printf("%.12f %zu %g %g\n", spw_result_distance(res), n, xy[0], xy[1]);
    if (spw_result_path_point(res, n, xy) != SPW_STATUS_OUT_OF_RANGE || spw_last_error() == NULL)
        return 1;
    spw_result_free(res);
    spw_instance_free(inst);
    return isnan(spw_result_distance(NULL)) ? 0 : 1;
}
