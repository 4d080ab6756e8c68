#include <pybind11/pybind11.h>
PYBIND11_MODULE(czpulse, m) { m.doc() = "stub"; }
