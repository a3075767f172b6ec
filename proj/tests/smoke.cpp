#include "hma/decomposition.hpp"
int main() { return hma::unit_ball_volume(2) > 3 ? 0 : 1; }
