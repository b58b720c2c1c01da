# Commands package for the fractalcurv CLI
