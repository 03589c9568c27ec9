#include <math.h>
#include <stdio.h>

#include "curvsense.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);     \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  CsUnits units = cs_units_natural();

  CsSurface *torus = NULL;
  CHECK(cs_surface_torus(1.0, 3.0, &torus) == CS_STATUS_OK);
  CsGeometryReport g;
  CHECK(cs_geometry_report(torus, 0.0, 0.0, units, &g) == CS_STATUS_OK);
  CHECK(fabs(g.surface_potential + 9.0 / 128.0) < 1e-15);
  cs_surface_free(torus);

  CsSurface *bad = NULL;
  CHECK(cs_surface_sphere(-1.0, &bad) == CS_STATUS_INVALID_ARGUMENT);
  CHECK(bad == NULL && cs_last_error_message() != NULL);

  CsState *state = NULL;
  CHECK(cs_state_two_level(1, 0, 0.7853981633974483, 0.0, &state) == CS_STATUS_OK);
  CsModel *model = NULL;
  CHECK(cs_model_new(state, 4.0, 1.0, units, &model) == CS_STATUS_OK);
  double h = 0.0;
  CHECK(cs_qfi_pure(model, &h) == CS_STATUS_OK);
  CHECK(fabs(h - 64.0) < 1e-9);
  CsRatio r;
  CHECK(cs_fi_qfi_ratio(model, &r) == CS_STATUS_OK);
  CHECK(r.ratio >= 0.0 && r.ratio <= 1.0);
  cs_model_free(model);
  cs_state_free(state);

  printf("ok %s\n", cs_version());
  return 0;
}
