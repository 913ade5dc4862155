# Workers package

