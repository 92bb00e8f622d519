/* Compiles the header as C and runs a minimal round trip. */
#include <math.h>
#include <stdio.h>

#include "pwl/pwl.h"

int main(void) {
  pwl_spec* spec = NULL;
  pwl_field* field = NULL;
  int origin = 0;
  double value = 0.0;
  if (pwl_spec_load(PWL_KERNEL_DIR "/lazy1d.json", &spec) != PWL_OK) {
    fprintf(stderr, "%s\n", pwl_last_error_message());
    return 1;
  }
  if (pwl_field_compute(spec, PWL_FIELD_PERTURBED, 1, 0, &field) != PWL_OK) return 1;
  if (pwl_field_value(field, &origin, &value) != PWL_OK) return 1;
  pwl_field_free(field);
  pwl_spec_free(spec);
  if (fabs(value - 0.5) > 1e-15) return 1;
  puts("ok");
  return 0;
}
