#include <doctest.h>

#include "hardcore/kernels.hpp"

using namespace hardcore;

TEST_CASE("kernel names") {
  for (WeightKernel k : kAllKernels) CHECK(parse_kernel(to_string(k)) == k);
  CHECK_THROWS(parse_kernel("medium"));
}

TEST_CASE("weight survival") {
  CHECK(weight_survival(WeightKernel::large, 2.0, 1.5) == 1.0);
  CHECK(weight_survival(WeightKernel::large, 2.0, 2.5) == 0.0);
  CHECK(weight_survival(WeightKernel::random, 7.0, 0.25) == doctest::Approx(0.75));
  CHECK(weight_survival(WeightKernel::random, 7.0, 1.5) == 0.0);
  CHECK(weight_survival(WeightKernel::random, 7.0, -1.0) == 1.0);
  CHECK(weight_survival(WeightKernel::small, 4.0, 0.5) == 0.0);
  CHECK(weight_survival(WeightKernel::small, 4.0, 0.25) == 1.0);
  CHECK(weight_survival(WeightKernel::small, 0.0, 1e9) == 1.0);
  CHECK(weight_survival(WeightKernel::isolated, 3.0, 1.0) == 1.0);
  CHECK(weight_survival(WeightKernel::isolated, 3.0, 1.01) == 0.0);
}

TEST_CASE("weight sampling") {
  CounterRng rng = CounterRng::from_seed(1);
  CHECK(sample_weight(WeightKernel::isolated, 9.0, rng) == 1.0);
  CHECK(sample_weight(WeightKernel::large, 3.7, rng) == 3.7);
  CHECK(sample_weight(WeightKernel::small, 4.0, rng) == 0.25);
  CounterRng a = CounterRng::from_seed(42), b = CounterRng::from_seed(42);
  for (int i = 0; i < 100; ++i) {
    const double w = sample_weight(WeightKernel::random, 1.0, a);
    CHECK(w > 0.0);
    CHECK(w < 1.0);
    CHECK(w == sample_weight(WeightKernel::random, 1.0, b));
  }
}

TEST_CASE("obstruction") {
  const Grain heavy{{0.0, 0.0, 0.0}, 1.0, 2.0};
  const Grain light{{1.5, 0.0, 0.0}, 1.0, 1.0};
  CHECK(obstructs(heavy, light, 1));
  CHECK_FALSE(obstructs(light, heavy, 1));

  const Grain a{{0.0, 0.0, 0.0}, 1.0, 1.0};
  const Grain far{{3.0, 0.0, 0.0}, 1.0, 1.0};
  CHECK_FALSE(obstructs(a, far, 1));
  CHECK_FALSE(obstructs(far, a, 1));

  const Grain b{{1.0, 0.0, 0.0}, 1.0, 1.0};
  CHECK(obstructs(a, b, 1));
  CHECK(obstructs(b, a, 1));

  const Grain touching{{2.0, 0.0, 0.0}, 1.0, 1.0};
  CHECK(are_neighbors(a, touching, 1));
  const Grain diagonal{{1.5, 1.5, 0.0}, 1.0, 1.0};
  CHECK(are_neighbors(a, diagonal, 1));
  CHECK_FALSE(are_neighbors(a, diagonal, 2));
}
