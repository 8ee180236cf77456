void ip_blocked(double *C, double *A, double *B, int sizel, int sizer, int shr0, int bi, int bk, int bj) {
  int ib, sb, jb, ii, si, jj;
  for (ib = 0; ib < (sizel/bi); ib++) {
    for (sb = 0; sb < (shr0/bk); sb++) {
      for (jb = 0; jb < (sizer/bj); jb++) {
        for (ii = 0; ii < bi; ii++) {
          for (si = 0; si < bk; si++) {
            for (jj = 0; jj < bj; jj++) {
              C[((jb*bj)+jj)+((ib*bi)+ii)*sizer] = C[((jb*bj)+jj)+((ib*bi)+ii)*sizer] + A[(((ib*bi)+ii)*shr0)+((sb*bk)+si)]*B[(((sb*bk)+si)*sizer)+((jb*bj)+jj)];
            }
          }
        }
      }
    }
  }
}
