#include <stdio.h>
#include "gasket_solenoid.h"

#define CHECK(call)                                                   \
  do {                                                                \
    GsStatus st = (call);                                             \
    if (st != GS_STATUS_OK) {                                         \
      char msg[256];                                                  \
      gs_last_error_message(msg, sizeof msg);                         \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)st, msg);         \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  uint64_t n = 0;
  CHECK(gs_edge_count(1, 0, 1, &n));
  if (n != 24) return 2;

  double z = 0, tail = 0;
  CHECK(gs_zeta(2.0, 80, &z, &tail));

  GsFunction *f = NULL;
  double v = 0, err = 0;
  CHECK(gs_function_new("alpha", 0, 6, &f));
  CHECK(gs_function_integrate(f, 0, &v, &err));
  gs_function_free(f);

  double d = 0;
  CHECK(gs_connes_distance("0/1,0/1", "1/1,0/1", 0, 3, &d));
  if (d != 1.0) return 3;

  if (gs_zeta(1.0, 10, &z, NULL) != GS_STATUS_DIVERGENT) return 4;

  printf("ok %s edges=%llu integral=%.6f distance=%.1f\n", gs_version(),
         (unsigned long long)n, v, d);
  return 0;
}
