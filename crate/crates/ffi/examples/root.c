#include "theta_entropy.h"
#include <stdio.h>
int main(void) {
  TeSystem *s = NULL; TeTarget *z = NULL; TeBracket r;
  uint32_t pre[1] = {2}, per[1] = {1};
  if (te_system_shifts(2, pre, 1, per, 1, &s) != TeStatus_Ok) return 1;
  if (te_target_whole(&z) != TeStatus_Ok) return 1;
  if (te_alpha_root(s, z, 0, 8, 1, 2, 0, &r) != TeStatus_Ok) return 1;
  printf("%.9f %.9f %d\n", r.lo, r.hi, r.exact);
  te_target_free(z); te_system_free(s);
  return 0;
}
