/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "aqnbf/aqnbf.h"

static int failures = 0;

#define EXPECT(cond)                                          \
  do {                                                        \
    if (!(cond)) {                                            \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                             \
    }                                                         \
  } while (0)

static const char* half_json =
    "{\"format\": \"collins_gisin\", \"scenario\": {\"parties\": 2, \"settings\": [2, 2], \"outcomes\": 2},"
    " \"entries\": [{\"coeff\": 0.5, \"monomial\": []}]}";

int main(void) {
  aq_solver_options sopts;
  aq_solver_options_default(&sopts);
  EXPECT(strlen(aq_version()) > 0);
  EXPECT(strcmp(aq_status_name(AQ_PARSE_ERROR), "") != 0);

  aq_functional* chsh = NULL;
  EXPECT(aq_functional_paper("chsh", &chsh) == AQ_OK);
  int p = 0, m = 0, d = 0;
  EXPECT(aq_functional_scenario(chsh, &p, &m, &d) == AQ_OK);
  EXPECT(p == 2 && m == 2 && d == 2);

  double value = 0.0, gap = 1.0;
  char* report = NULL;
  EXPECT(aq_extremize(chsh, 1, &sopts, &value, &gap, &report) == AQ_OK);
  EXPECT(fabs(value - (4.0 + 2.0 * sqrt(2.0)) / 8.0) < 1e-6);
  EXPECT(fabs(gap) < 1e-6);
  EXPECT(report != NULL && strstr(report, "certificate") != NULL);
  aq_string_free(report);

  int is_nbf = 0;
  EXPECT(aq_verify_nbf(chsh, 1e-6, &sopts, &is_nbf, NULL) == AQ_OK);
  EXPECT(is_nbf == 1);

  aq_functional* doubled = NULL;
  EXPECT(aq_functional_scale(chsh, 2.0, &doubled) == AQ_OK);
  EXPECT(aq_verify_nbf(doubled, 1e-6, &sopts, &is_nbf, NULL) == AQ_OK);
  EXPECT(is_nbf == 0);
  aq_functional_free(doubled);

  char* text = NULL;
  EXPECT(aq_functional_to_json(chsh, 0, &text) == AQ_OK);
  aq_functional* back = NULL;
  EXPECT(aq_functional_parse(text, &back) == AQ_OK);
  aq_string_free(text);
  aq_functional_free(back);
  aq_functional_free(chsh);

  aq_functional* bad = NULL;
  EXPECT(aq_functional_parse("{not json", &bad) == AQ_PARSE_ERROR);
  EXPECT(bad == NULL);
  EXPECT(strlen(aq_last_error()) > 0);
  EXPECT(aq_functional_load("/nonexistent/f.json", &bad) != AQ_OK);
  EXPECT(aq_functional_paper("nope", &bad) == AQ_INVALID_ARGUMENT);
  EXPECT(aq_extremize(NULL, 0, &sopts, &value, &gap, NULL) == AQ_INVALID_ARGUMENT);

  aq_functional *u00 = NULL, *u01 = NULL, *v = NULL, *w = NULL;
  EXPECT(aq_functional_paper("u00", &u00) == AQ_OK);
  EXPECT(aq_functional_paper("u01", &u01) == AQ_OK);
  EXPECT(aq_functional_paper("v", &v) == AQ_OK);
  EXPECT(aq_functional_paper("w", &w) == AQ_OK);
  /* An incomplete family is rejected; the constant family 1/2 is complete. */
  const aq_functional* members[4] = {u00, u00, u01, u01};
  aq_functional* composed = NULL;
  EXPECT(aq_compose(v, members, 2, 2, 1, &composed) != AQ_OK);
  EXPECT(composed == NULL);
  aq_functional* half = NULL;
  EXPECT(aq_functional_parse(half_json, &half) == AQ_OK);
  const aq_functional* halves[4] = {half, half, half, half};
  EXPECT(aq_compose(v, halves, 2, 2, 1, &composed) == AQ_OK);
  EXPECT(aq_functional_scenario(composed, &p, &m, &d) == AQ_OK);
  EXPECT(p == 3);
  EXPECT(aq_verify_nbf(composed, 5e-4, &sopts, &is_nbf, NULL) == AQ_OK);
  EXPECT(is_nbf == 1);
  aq_functional_free(composed);
  aq_functional_free(half);

  EXPECT(aq_extremize(w, 0, &sopts, &value, &gap, NULL) == AQ_OK);
  EXPECT(value > -0.0038 && value < -0.0028);

  int holds = 0;
  EXPECT(aq_reproduce(&sopts, &value, &holds, NULL) == AQ_OK);
  EXPECT(holds == 1);

  int claim = 0;
  EXPECT(aq_perturb(0.05, 1, 4, &sopts, &value, &claim, NULL) == AQ_INVALID_ARGUMENT);

  aq_seesaw_options seesaw;
  aq_seesaw_options_default(&seesaw);
  seesaw.restarts = 0;
  int reached = 0;
  EXPECT(aq_seesaw_run(&seesaw, &value, &reached, NULL) == AQ_NO_WORK);

  aq_functional_free(u00);
  aq_functional_free(u01);
  aq_functional_free(v);
  aq_functional_free(w);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
