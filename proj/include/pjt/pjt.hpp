// pjt.hpp: umbrella header for the product Jahn-Teller vibronic solver.

#pragma once

#include "pjt/fock_basis.hpp"
#include "pjt/hamiltonian.hpp"
#include "pjt/eigensolver.hpp"
#include "pjt/analysis.hpp"
#include "pjt/io.hpp"
