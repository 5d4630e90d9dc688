#include "espider/acceptance.hpp"

#include <iostream>

int main() {
  int failures = espider::accept::run_all(std::cout);
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
