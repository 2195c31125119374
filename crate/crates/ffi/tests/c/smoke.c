#include <stdio.h>
#include "greedy_lab.h"
int main(void) {
  GlEngine *e = NULL;
  if (gl_engine_new("spreading:3", &e) != GL_STATUS_OK) { puts(gl_last_error_message()); return 1; }
  char *v = NULL;
  if (gl_norm(e, "7:1,8:1,9:1,10:1,11:1,12:1", &v) != GL_STATUS_OK) return 1;
  printf("%s %s\n", v, gl_version());
  gl_string_free(v);
  GlStatus s = gl_norm(e, "13:1", &v);
  printf("%d %s\n", s, gl_last_error_message());
  gl_engine_free(e);
  return 0;
}
