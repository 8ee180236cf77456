void ip_rows(double *C, double *A, double *B, int sizel, int sizer, int sizeres, int np, int shr0) {
  int k, ip, sigma, j;
  for (k = 0; k < np; k++) {
    for (ip = 0; ip < (sizel/np); ip++) {
      for (sigma = 0; sigma < shr0; sigma++) {
        for (j = 0; j < sizer; j++) {
          C[j+(ip+(sizel/np)*k)*sizer] = C[j+(ip+(sizel/np)*k)*sizer] + A[((ip+(sizel/np)*k)*shr0)+sigma]*B[(sigma*sizer)+j];
        }
      }
    }
  }
}
