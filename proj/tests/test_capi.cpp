#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "pwl/pwl.h"

namespace {

const char* kLazy = R"({"dim": 1,
  "P": [{"u": [-1], "w": 0.25}, {"u": [0], "w": 0.5}, {"u": [1], "w": 0.25}],
  "a": [{"u": [-1], "w": -0.1}, {"u": [1], "w": 0.1}]})";

struct Spec {
  pwl_spec* p = nullptr;
  Spec() { REQUIRE(pwl_spec_parse(kLazy, &p) == PWL_OK); }
  ~Spec() { pwl_spec_free(p); }
};

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("spec loading and error reporting") {
    pwl_spec* spec = nullptr;
    CHECK(pwl_spec_load("/nonexistent.json", &spec) == PWL_IO);
    CHECK(spec == nullptr);
    CHECK(std::string(pwl_last_error_message()).find("Io") != std::string::npos);
    CHECK(pwl_spec_parse("{\"dim\": 1, \"P\": [", &spec) == PWL_PARSE);
    CHECK(pwl_spec_parse(R"({"dim": 1, "P": [{"u": [-1], "w": 0.25}, {"u": [0], "w": 0.5}, {"u": [1], "w": 0.25}],
                            "a": [{"u": [-1], "w": -0.2}, {"u": [1], "w": 0.1}]})",
                         &spec) == PWL_NOT_ANTISYMMETRIC);
    CHECK(std::string(pwl_error_name(PWL_NOT_ANTISYMMETRIC)) == "NotAntisymmetric");
    CHECK(pwl_spec_parse(nullptr, &spec) == PWL_INVALID_ARGUMENT);
    CHECK(pwl_spec_load(PWL_KERNEL_DIR "/lazy1d.json", &spec) == PWL_OK);
    CHECK(pwl_spec_dim(spec) == 1);
    CHECK(pwl_spec_is_periodic(spec) == 0);
    double B = 0, d = 0;
    CHECK(pwl_spec_moments(spec, &B, &d) == PWL_OK);
    CHECK(B == doctest::Approx(0.5));
    CHECK(d == doctest::Approx(0.2));
    pwl_spec_free(spec);
    pwl_spec_free(nullptr);
  }

  TEST_CASE("fields through the C boundary") {
    Spec s;
    pwl_field* pert = nullptr;
    pwl_field* anti = nullptr;
    REQUIRE(pwl_field_compute(s.p, PWL_FIELD_PERTURBED, 20, 0, &pert) == PWL_OK);
    REQUIRE(pwl_field_compute(s.p, PWL_FIELD_PI_ANTISYMMETRIC, 20, 0, &anti) == PWL_OK);
    CHECK(pwl_field_radius(pert) == 20);
    CHECK(pwl_field_size(pert) == 41);
    double total = 0.0;
    for (int x = -20; x <= 20; ++x) {
      double a = 0, b = 0;
      CHECK(pwl_field_value(pert, &x, &a) == PWL_OK);
      CHECK(pwl_field_value(anti, &x, &b) == PWL_OK);
      CHECK(std::abs(a - b) <= 1e-13);
      total += a;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    int far = 99;
    double v = 1;
    CHECK(pwl_field_value(pert, &far, &v) == PWL_OK);  // beyond the reach of n steps
    CHECK(v == 0.0);
    double buf[41];
    CHECK(pwl_field_copy(pert, buf, 40) == PWL_INVALID_ARGUMENT);
    CHECK(pwl_field_copy(pert, buf, 41) == PWL_OK);
    pwl_field* sym = nullptr;
    CHECK(pwl_field_compute(s.p, PWL_FIELD_PI_SYMMETRIC, 5, 0, &sym) == PWL_WRONG_PARITY);
    CHECK(pwl_field_compute(s.p, 42, 5, 0, &sym) == PWL_INVALID_ARGUMENT);
    pwl_field_free(pert);
    pwl_field_free(anti);
  }

  TEST_CASE("profile rows and evaluators") {
    Spec s;
    const pwl_quadrature cfg = pwl_quadrature_default();
    pwl_profile* p = nullptr;
    REQUIRE(pwl_profile_compute(s.p, 100, -10, 10, &cfg, 0, &p) == PWL_OK);
    CHECK(pwl_profile_rows(p) == 21);
    int x = 0;
    double row[7];
    CHECK(pwl_profile_row(p, 15, &x, row) == PWL_OK);
    CHECK(x == 5);
    const double point = 5.0;
    double dq = 0, ds = 0;
    CHECK(pwl_delta_quadrature(s.p, 100, &point, &cfg, &dq) == PWL_OK);
    CHECK(pwl_delta_sum(s.p, 100, &point, &ds) == PWL_OK);
    CHECK(row[4] == doctest::Approx(dq).epsilon(1e-12));
    CHECK(row[3] == doctest::Approx(ds).epsilon(1e-12));
    CHECK(pwl_profile_row(p, 21, &x, row) == PWL_INVALID_ARGUMENT);
    pwl_profile_free(p);
    double e = 0;
    CHECK(pwl_erf_sigma(1.0, 0.0, &e) == PWL_OK);
    CHECK(e == 0.0);
    CHECK(pwl_scale_guard(100) == doctest::Approx(10.0 * std::log(100.0)));
  }

  TEST_CASE("sampling and summary") {
    Spec s;
    pwl_empirical* f = nullptr;
    REQUIRE(pwl_sample(s.p, 1, 100000, 3, &f) == PWL_OK);
    double drift = 0;
    CHECK(pwl_sample_drift(f, &drift) == PWL_OK);
    CHECK(std::abs(drift - 0.2) <= 4 * std::sqrt(0.46 / 100000));
    pwl_sample_free(f);
    CHECK(pwl_sample(s.p, 1, 0, 3, &f) == PWL_INVALID_ARGUMENT);

    char* json = nullptr;
    REQUIRE(pwl_spec_summary_json(s.p, &json) == PWL_OK);
    const std::string text(json);
    pwl_string_free(json);
    CHECK(text.find("\"dim\"") != std::string::npos);
    CHECK(text.find("\"periodic\"") != std::string::npos);
    CHECK(pwl_spec_summary_json(nullptr, &json) == PWL_INVALID_ARGUMENT);
  }
}
