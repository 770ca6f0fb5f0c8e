#pragma once

#include "accrete/characteristics.hpp"
#include "accrete/cylinder.hpp"
#include "accrete/driver.hpp"
#include "accrete/errors.hpp"
#include "accrete/material.hpp"
#include "accrete/numerics.hpp"
#include "accrete/rate.hpp"
#include "accrete/scenario_io.hpp"
#include "accrete/sphere.hpp"
#include "accrete/tensor.hpp"
#include "accrete/transport.hpp"
