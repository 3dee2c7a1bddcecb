/* Exercises the C interface from C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "nlgb/nlgb.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

#define EXPECT_OK(call) EXPECT((call) == NLGB_OK)

static void kerr_callback(int64_t m, int64_t t, double p_u, double p_d, double* f_u, double* f_d, void* user) {
  const double alpha = *(const double*)user;
  (void)m;
  (void)t;
  *f_u = 2.0 * 3.14159265358979323846 * alpha * p_u;
  *f_d = 2.0 * 3.14159265358979323846 * alpha * p_d;
}

static void test_errors(void) {
  nlgb_config* c = NULL;
  EXPECT(nlgb_config_create(NULL) == NLGB_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(nlgb_last_error()) > 0);
  EXPECT_OK(nlgb_config_create(&c));
  EXPECT(strlen(nlgb_last_error()) == 0);
  EXPECT(nlgb_config_set_steps(c, -1) == NLGB_ERR_INVALID_ARGUMENT);
  EXPECT(nlgb_config_set_record_every(c, 0) == NLGB_ERR_INVALID_ARGUMENT);
  EXPECT(nlgb_config_set_phase(c, NLGB_RULE_KERR, NAN) == NLGB_ERR_INVALID_ARGUMENT);
  {
    const double re[4] = {1, 1, 0, 1}, im[4] = {0, 0, 0, 0};
    EXPECT(nlgb_config_set_coin(c, re, im) == NLGB_ERR_INVALID_ARGUMENT);
  }
  {
    const int64_t m[1] = {0};
    const double ur[1] = {0.6}, ui[1] = {0}, dr[1] = {0}, di[1] = {0.7};
    EXPECT(nlgb_config_set_custom_init(c, 1, m, ur, ui, dr, di) == NLGB_ERR_NORMALIZATION);
  }
  EXPECT(nlgb_config_load_init_file(c, "/nonexistent/init.txt") == NLGB_ERR_IO);
  EXPECT(nlgb_config_from_manifest("/nonexistent/manifest.json", &c) == NLGB_ERR_IO);
  EXPECT(strcmp(nlgb_status_name(NLGB_ERR_SINGULAR_FIT), "singular fit") == 0);
  nlgb_config_destroy(c);
  nlgb_config_destroy(NULL);
  nlgb_run_destroy(NULL);
  nlgb_sweep_destroy(NULL);
}

static void test_single_run(void) {
  nlgb_config* c = NULL;
  nlgb_run* r = NULL;
  size_t count = 0, len = 0, n = 0;
  int64_t t = 0, m_min = 0;
  double* p;
  double defect = 1.0, s = 0.0;
  nlgb_phase_label label;
  nlgb_track_sample left, right;
  int found = 1;

  EXPECT_OK(nlgb_config_create(&c));
  EXPECT_OK(nlgb_config_set_phase(c, NLGB_RULE_KERR, 0.4));
  EXPECT_OK(nlgb_config_set_steps(c, 300));
  EXPECT_OK(nlgb_config_set_record_every(c, 100));
  EXPECT_OK(nlgb_run_create(c, &r));

  EXPECT_OK(nlgb_run_snapshot_count(r, &count));
  EXPECT(count == 4);
  EXPECT_OK(nlgb_run_snapshot_info(r, 1, &t, &m_min, &len));
  EXPECT(t == 100);
  EXPECT(m_min == -101);
  EXPECT(len == 203);
  p = (double*)malloc(len * sizeof *p);
  EXPECT(nlgb_run_snapshot_probability(r, 1, p, len - 1) == NLGB_ERR_INVALID_ARGUMENT);
  EXPECT_OK(nlgb_run_snapshot_probability(r, 1, p, len));
  {
    double total = 0.0;
    size_t k;
    for (k = 0; k < len; ++k) total += p[k];
    EXPECT(fabs(total - 1.0) < 1e-12);
    EXPECT(p[1 + 100 + 1] == 0.0); /* m = 1 at even t */
  }
  free(p);
  EXPECT(nlgb_run_snapshot_info(r, 4, &t, &m_min, &len) == NLGB_ERR_BOUNDS);

  EXPECT_OK(nlgb_run_max_norm_defect(r, &defect));
  EXPECT(defect < 1e-12);
  EXPECT_OK(nlgb_run_sigma_over_t(r, 1, &s));
  EXPECT(fabs(s - 1.0) < 1e-14);
  EXPECT(nlgb_run_sigma_over_t(r, 0, &s) == NLGB_ERR_BOUNDS);

  EXPECT_OK(nlgb_run_track_length(r, &n));
  EXPECT(n == 301);
  EXPECT_OK(nlgb_run_track_sample(r, NLGB_SIDE_LEFT, 300, &left));
  EXPECT_OK(nlgb_run_track_sample(r, NLGB_SIDE_RIGHT, 300, &right));
  EXPECT(left.valid && right.valid);
  EXPECT(fabs(left.m_cm + right.m_cm) < 1e-10);
  EXPECT(fabs(right.intensity - 0.30) < 0.05);

  EXPECT_OK(nlgb_run_phase(r, &label));
  EXPECT(label.phase == NLGB_DYN_I);
  EXPECT_OK(nlgb_run_collision(r, &found, NULL));
  EXPECT(found == 0);
  {
    size_t needed = 0;
    char* text;
    EXPECT_OK(nlgb_run_report(r, NULL, 0, &needed));
    EXPECT(needed > 1);
    text = (char*)malloc(needed);
    EXPECT(nlgb_run_report(r, text, needed - 1, &needed) == NLGB_ERR_INVALID_ARGUMENT);
    EXPECT_OK(nlgb_run_report(r, text, needed, &needed));
    EXPECT(strncmp(text, "phase: I\n", 9) == 0);
    free(text);
  }
  {
    size_t needed = 0;
    char buf[4096];
    nlgb_config* back = NULL;
    EXPECT_OK(nlgb_config_to_json(c, buf, sizeof buf, &needed));
    EXPECT(strstr(buf, "\"kerr\"") != NULL);
    EXPECT_OK(nlgb_config_from_json(buf, &back));
    {
      int is_kerr = 0;
      double alpha = 0.0;
      EXPECT_OK(nlgb_config_get_alpha(back, &is_kerr, &alpha));
      EXPECT(is_kerr == 1 && alpha == 0.4);
    }
    nlgb_config_destroy(back);
    EXPECT(nlgb_config_from_json("{", &back) == NLGB_ERR_PARSE);
  }
  nlgb_run_destroy(r);
  nlgb_config_destroy(c);
}

static void test_custom_phase_and_init(void) {
  nlgb_config *kerr = NULL, *custom = NULL;
  nlgb_run *a = NULL, *b = NULL;
  double alpha = 0.45;
  double pa[203], pb[203];
  size_t k;
  const int64_t m[2] = {-1, 2};
  const double ur[2] = {0.6, 0.0}, ui[2] = {0.0, 0.0}, dr[2] = {0.0, 0.0}, di[2] = {0.0, 0.8};

  EXPECT_OK(nlgb_config_create(&kerr));
  EXPECT_OK(nlgb_config_set_phase(kerr, NLGB_RULE_KERR, alpha));
  EXPECT_OK(nlgb_config_set_steps(kerr, 100));
  EXPECT_OK(nlgb_config_clone(kerr, &custom));
  EXPECT_OK(nlgb_config_set_custom_phase(custom, "kerr-callback", kerr_callback, &alpha));
  EXPECT_OK(nlgb_run_create(kerr, &a));
  EXPECT_OK(nlgb_run_create(custom, &b));
  EXPECT_OK(nlgb_run_snapshot_probability(a, 100, pa, 203));
  EXPECT_OK(nlgb_run_snapshot_probability(b, 100, pb, 203));
  for (k = 0; k < 203; ++k) EXPECT(fabs(pa[k] - pb[k]) < 1e-13);
  nlgb_run_destroy(a);
  nlgb_run_destroy(b);

  EXPECT_OK(nlgb_config_set_custom_init(kerr, 2, m, ur, ui, dr, di));
  EXPECT_OK(nlgb_config_set_init(custom, NLGB_INIT_UPDELTA));
  EXPECT_OK(nlgb_run_create(kerr, &a));
  {
    double defect = 1.0;
    EXPECT_OK(nlgb_run_max_norm_defect(a, &defect));
    EXPECT(defect < 1e-12);
  }
  nlgb_run_destroy(a);
  nlgb_config_destroy(kerr);
  nlgb_config_destroy(custom);
}

static void test_fit(void) {
  double alpha[16], tcol[16];
  nlgb_fit_result fit;
  int k;
  for (k = 0; k < 16; ++k) {
    alpha[k] = 0.49 + 0.01 * k;
    tcol[k] = 1.0 / (-0.0297 / alpha[k] + 0.0627);
  }
  EXPECT_OK(nlgb_fit_hyperbola(16, alpha, tcol, &fit));
  EXPECT(fabs(fit.a + 0.0297) < 1e-10);
  EXPECT(fabs(fit.b - 0.0627) < 1e-10);
  EXPECT(fabs(fit.r2 - 1.0) < 1e-12);
  EXPECT(fabs(fit.alpha_I - 0.0297 / 0.0627) < 1e-9);
  EXPECT(fit.points == 16);
  EXPECT(nlgb_fit_hyperbola(2, alpha, tcol, &fit) == NLGB_ERR_INSUFFICIENT_DATA);
  {
    char buf[256];
    size_t needed = 0;
    EXPECT_OK(nlgb_fit_report(&fit, buf, sizeof buf, &needed));
  }
}

static void test_sweep(const char* workdir) {
  nlgb_config* base = NULL;
  nlgb_sweep *one = NULL, *four = NULL;
  size_t n = 0, i;
  char dir[1024], index[1100];
  nlgb_fit_result fit;

  EXPECT_OK(nlgb_config_create(&base));
  EXPECT_OK(nlgb_config_set_phase(base, NLGB_RULE_KERR, 0.0));
  EXPECT_OK(nlgb_config_set_steps(base, 700));
  EXPECT(nlgb_sweep_create(base, 0.6, 0.5, 0.01, 1, &one) == NLGB_ERR_INVALID_ARGUMENT);
  EXPECT_OK(nlgb_sweep_create(base, 0.55, 0.62, 0.01, 1, &one));
  EXPECT_OK(nlgb_sweep_create(base, 0.55, 0.62, 0.01, 4, &four));
  EXPECT_OK(nlgb_sweep_size(one, &n));
  EXPECT(n == 8);
  for (i = 0; i < n; ++i) {
    double a1, a4;
    int h1, h4;
    int64_t t1, t4;
    nlgb_phase_label l1, l4;
    EXPECT_OK(nlgb_sweep_entry(one, i, &a1, &h1, &t1, &l1));
    EXPECT_OK(nlgb_sweep_entry(four, i, &a4, &h4, &t4, &l4));
    EXPECT(a1 == a4 && h1 == h4 && t1 == t4 && l1.phase == l4.phase);
    EXPECT(h1 == 1);
  }
  snprintf(dir, sizeof dir, "%s/capi_sweep", workdir);
  EXPECT_OK(nlgb_sweep_write_artifacts(one, dir));
  snprintf(index, sizeof index, "%s/sweep_index.csv", dir);
  EXPECT_OK(nlgb_fit_sweep_index(index, &fit));
  EXPECT(fit.points == 8);
  EXPECT(fit.r2 > 0.9);
  nlgb_sweep_destroy(one);
  nlgb_sweep_destroy(four);
  nlgb_config_destroy(base);
}

static void test_artifacts_and_manifest(const char* workdir) {
  nlgb_config *c = NULL, *loaded = NULL;
  nlgb_run* r = NULL;
  char dir[1024], manifest[1100];
  int64_t steps = 0;

  EXPECT_OK(nlgb_config_create(&c));
  EXPECT_OK(nlgb_config_set_phase(c, NLGB_RULE_LINEAR, 0.1));
  EXPECT_OK(nlgb_config_set_steps(c, 40));
  EXPECT_OK(nlgb_config_set_halfwidth(c, 5));
  EXPECT_OK(nlgb_run_create(c, &r));
  snprintf(dir, sizeof dir, "%s/capi_run", workdir);
  EXPECT_OK(nlgb_run_write_artifacts(r, dir));
  snprintf(manifest, sizeof manifest, "%s/manifest.json", dir);
  EXPECT_OK(nlgb_config_from_manifest(manifest, &loaded));
  EXPECT_OK(nlgb_config_get_steps(loaded, &steps));
  EXPECT(steps == 40);
  nlgb_run_destroy(r);
  nlgb_config_destroy(c);
  nlgb_config_destroy(loaded);
}

int main(int argc, char** argv) {
  const char* workdir = argc > 1 ? argv[1] : ".";
  test_errors();
  test_single_run();
  test_custom_phase_and_init();
  test_fit();
  test_sweep(workdir);
  test_artifacts_and_manifest(workdir);
  if (failures) {
    fprintf(stderr, "%d C API expectation(s) failed\n", failures);
    return 1;
  }
  printf("C API: all expectations passed (nlgb %s)\n", nlgb_version());
  return 0;
}
